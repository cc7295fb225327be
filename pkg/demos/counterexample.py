"""A symbol that is not rotation invariant yet commutes with a radial Toeplitz operator.

With lam = alpha (1 - exp(-2 pi i m / N)) the operator T_f, f = exp(lam |z|^(2m)),
is diagonal with entries c^(d+s+k) where c is an N-th root of unity.  The
symbol g = z1^N / |z|^N only couples degrees that differ by N, so T_g sees
the same diagonal value on both ends of every entry it touches.
"""

from fockop import SpaceParams, counterexample_check


def main():
    for d, m, N in [(1, 1.0, 7), (1, 1.0, 9), (2, 1.0, 7), (1, 1.5, 10)]:
        p = SpaceParams(d, m)
        rep = counterexample_check(N, p, D=14)
        print(f"d={d} m={m:g} N={N}: lam={rep.lam:.4f}  c^N={rep.c ** N:.2e}  "
              f"residual={rep.commutator.residual:.2e}  offblock={rep.offblock:.3f}")


if __name__ == "__main__":
    main()
