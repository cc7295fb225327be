"""Commutator residuals as the truncation degree D grows.

Radial pairs commute exactly, so their residual stays at roundoff.  A
non-invariant symbol such as z1 against exp(0.5 r^2) keeps a residual
bounded away from zero at every D, which is the finite-D picture of the
invariance criterion for commuting with a radial Toeplitz operator.
"""

from fockop import SpaceParams, commutator_residual, offblock_mass, parse_symbol

PAIRS = [("exp(0.5*r^2)", "r^2"), ("exp(0.5*r^2)", "z1"), ("exp(0.5*r^2)", "re(z1)")]


def main():
    for d, m in [(1, 1.0), (1, 2.0), (2, 1.0)]:
        p = SpaceParams(d, m)
        print(f"d={d} m={m:g}")
        print(f"  {'pair':<28}" + "".join(f"{'D=' + str(D):>10}" for D in (4, 6, 8, 10)) + f"{'offblock':>10}")
        for fs, gs in PAIRS:
            f, g = parse_symbol(fs, d), parse_symbol(gs, d)
            row = [commutator_residual(f, g, p, D).residual for D in (4, 6, 8, 10)]
            off = offblock_mass(g, p, 10)
            print(f"  {fs + ' , ' + gs:<28}" + "".join(f"{v:10.2e}" for v in row) + f"{off:10.3f}")
        print()


if __name__ == "__main__":
    main()
