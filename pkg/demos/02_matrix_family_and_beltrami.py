"""The phase family M(theta) and its complex-analytic disguise.

Every matrix of the one-parameter family splits into a conformal part of
modulus 1/2 and an anticonformal part of modulus 1/6 at the tripled phase.
Read as Wirtinger derivatives of a complex map this is exactly the
constrained system  dv/dzbar = (4/3) (dv/dz)^3 with |dv/dz| = 1/2.

The family has no rank-one connections: the determinant of any difference
M(t + a) - M(t) equals f(a) > 0 for a in (0, 2pi), and f/g^2 (with g the
squared Frobenius norm of the difference) is bounded below by ~1/6.
"""

import numpy as np

import eikolab as ek

theta = 1.1
m = ek.k_matrix(theta)
print(f"M({theta}) =\n{np.array_str(m.matrix, precision=6)}")
print(f"|M|_F^2 = {m.frobenius_sq:.12f}  (constant 5/9 over the family;")
print("         the half-norm convention reads the same constant as 10/36)")

wp = ek.WirtingerPair.from_matrix(m.matrix)
print(f"\ndv/dz = {wp.dz:.6f}, |dv/dz| = {abs(wp.dz):.6f}")
print(f"dv/dzbar = {wp.dzbar:.6f}")
print(f"(4/3)(dv/dz)^3 = {4 / 3 * wp.dz ** 3:.6f}")

r1, r2 = ek.beltrami_residual(ek.k_matrix_values(np.linspace(0, 2 * np.pi, 720)))
print(f"\nBeltrami residuals over 720 phases: max r1 = {r1.max():.2e}, "
      f"max r2 = {r2.max():.2e}")

rec = ek.phase_recover(m.matrix)
print(f"phase recovered from entries: {rec:.12f} (true {theta})")

print("\ndeterminant/norm kernels of phase gaps:")
for a in (1e-2, np.pi / 2, np.pi):
    k = ek.det_kernel(a)
    print(f"  a = {a:<8.4g} f = {float(k.f):.8f}  g = {float(k.g):.8f}  "
          f"f/g^2 = {float(k.ratio):.6f}")
print(f"  small-gap expansions: f ~ a^4/6, g ~ a^2")

res = ek.c0_bruteforce(n_samples=100_000)
print(f"\nbrute-force lower bound: min f/g^2 = {res.c0:.8f} at a = {res.alpha_at_min:.4g}")
print(f"min f = {res.f_min:.3e} > 0: no rank-one connections")
print(f"note: {res.conjecture}")
