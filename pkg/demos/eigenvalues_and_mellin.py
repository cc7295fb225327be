"""Radial eigenvalues Omega(f, k) and the Mellin-side identities behind them.

Omega(f, k) is the eigenvalue of T_f on homogeneous polynomials of degree k.
For f = exp(lam r^(2m)) it equals (1 - lam/alpha)^(-(d+s+k)/m) and for
f = r^2 it is a Gamma quotient.  The period scan lists integer shifts n with
Omega(f1, z) = Omega(f2, z + n) on a grid: all shifts for constants, only
n = 0 for a non-constant symbol against itself, none for unrelated symbols.
"""

import numpy as np
from scipy.special import loggamma

from fockop import SpaceParams, constant, exp_radial, omega, period_scan, radial_power


def main():
    p = SpaceParams(1, 1.0)
    f = exp_radial(0.3, 1.0, 1)
    print("Omega(exp(0.3 r^2), k), closed form vs quadrature")
    for k in range(5):
        a, b = omega(f, k, p), omega(f, k, p, method="quadrature")
        print(f"  k={k}: {a.real:.15f}  {b.real:.15f}  diff={abs(a - b):.1e}")

    print("\nOmega(r^2, zeta) against the Gamma quotient at complex zeta")
    for zeta in (0.5, 2 + 1j, 7 - 3j):
        val = omega(radial_power(2, 1), zeta, p, method="quadrature")
        ref = np.exp(loggamma(2 + zeta) - loggamma(1 + zeta))
        print(f"  zeta={zeta}: {val:.12f}  ref={ref:.12f}")

    one, r2 = constant(1, 1), radial_power(2, 1)
    print("\nperiod scans over n in [-5, 5]")
    for name, (f1, f2) in {"1 vs 1": (one, one), "r^2 vs r^2": (r2, r2), "r^2 vs 1": (r2, one)}.items():
        print(f"  {name:<11}: {sorted(period_scan(f1, f2, p))}")


if __name__ == "__main__":
    main()
