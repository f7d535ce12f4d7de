"""Direction-selective entropies approximating the half-space field |z|^2 xi.

The target field equals |z|^2 xi where z . xi > 0 and vanishes otherwise.
It is reached as the pointwise limit of genuine entropies built from the
generators phi_k(z) = s_k(z . xi), where s_k(x) = s_0(k x) / k and s_0 is a
smooth monotone transition with s_0 = 0 on x <= 0 and s_0(x) = x on x >= 1.
On the unit circle the antisymmetry density psi_k = grad(Delta phi_k) . z_perp / 4
is supported in the shrinking band 0 <= z . xi <= 1/k, which for off-axis xi
stays away from the coordinate axes and makes psi_k(z) / (z1 z2) bounded.

All s_0-dependent constants are measured from the profile, never assumed.
The radial cutoff that compactifies the generator lives at radius k; every
evaluation here asserts |z| <= k so the cutoff never activates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from .errors import HypothesisError

__all__ = [
    "s0_profile",
    "SpecialEntropyXi",
    "special_xi_entropy",
    "ChiKBound",
    "chi_k_bound",
]


def _transition_derivatives(x: np.ndarray):
    """(B, B', B'', B''') of the step B = 1/(1 + e^g), g = 1/x - 1/(1-x).

    Uses the logistic chain B' = -g' B (1 - B), which stays finite on the
    whole open interval because B(1-B) underflows gracefully where g blows
    up.  Valid for x strictly inside (0, 1).
    """
    g = 1.0 / x - 1.0 / (1.0 - x)
    g1 = -1.0 / x ** 2 - 1.0 / (1.0 - x) ** 2
    g2 = 2.0 / x ** 3 - 2.0 / (1.0 - x) ** 3
    g3 = -6.0 / x ** 4 - 6.0 / (1.0 - x) ** 4
    with np.errstate(over="ignore", under="ignore"):
        B = np.where(g >= 0, np.exp(-np.abs(g)) / (1.0 + np.exp(-np.abs(g))),
                     1.0 / (1.0 + np.exp(-np.abs(g))))
    S = B * (1.0 - B)
    B1 = -g1 * S
    S1 = B1 * (1.0 - 2.0 * B)
    B2 = -g2 * S - g1 * S1
    S2 = B2 * (1.0 - 2.0 * B) - 2.0 * B1 ** 2
    B3 = -g3 * S - 2.0 * g2 * S1 - g1 * S2
    return B, B1, B2, B3


@lru_cache(maxsize=1)
def _s0_sympy_reference():
    """Sympy closed forms of s0 derivatives, used by tests as an oracle.

    Evaluated through complex arithmetic because the printed expressions
    contain float powers of negative bases.
    """
    x = sp.symbols("x")
    s0 = x / (1 + sp.exp(1 / x - 1 / (1 - x)))
    fns = tuple(sp.lambdify(x, sp.diff(s0, x, k), modules="numpy") for k in range(4))

    def make(f):
        def run(xv):
            return np.real(f(np.asarray(xv, dtype=complex)))
        return run

    return tuple(make(f) for f in fns)


def s0_profile(x, order: int = 0) -> np.ndarray:
    """s_0 (order=0) or its derivative of given order, evaluated piecewise.

    s_0 vanishes identically for x <= 0 and equals x for x >= 1; derivatives
    of order >= 2 vanish outside (0, 1).
    """
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0..3")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    right = x >= 1.0 - 1e-12
    if order == 0:
        out[right] = x[right]
    elif order == 1:
        out[right] = 1.0
    mid = (x > 1e-12) & (x < 1.0 - 1e-12)
    if np.any(mid):
        xm = x[mid]
        B, B1, B2, B3 = _transition_derivatives(xm)
        if order == 0:
            out[mid] = xm * B
        elif order == 1:
            out[mid] = B + xm * B1
        elif order == 2:
            out[mid] = 2.0 * B1 + xm * B2
        else:
            out[mid] = 3.0 * B2 + xm * B3
    return out


def _sk(x, k: int, order: int = 0) -> np.ndarray:
    """s_k(x) = s_0(k x)/k and derivatives: d^m s_k = k^(m-1) s_0^(m)(k x)."""
    return s0_profile(np.asarray(x, dtype=float) * k, order) * float(k) ** (order - 1)


@dataclass(frozen=True)
class SpecialEntropyXi:
    """Evaluators for the k-th approximant along direction xi."""

    xi: tuple[float, float]
    k: int

    def _t(self, z1, z2):
        return self.xi[0] * np.asarray(z1, dtype=float) + self.xi[1] * np.asarray(z2, dtype=float)

    def _assert_inside_cutoff(self, z1, z2):
        r = np.hypot(np.asarray(z1, dtype=float), np.asarray(z2, dtype=float))
        if np.any(r > self.k * (1 + 1e-12)):
            raise HypothesisError("evaluation outside the radial cutoff ball B_k")

    def phi_k(self, z1, z2) -> np.ndarray:
        self._assert_inside_cutoff(z1, z2)
        return _sk(self._t(z1, z2), self.k, 0)

    def grad_phi_k(self, z1, z2):
        self._assert_inside_cutoff(z1, z2)
        d = _sk(self._t(z1, z2), self.k, 1)
        return d * self.xi[0], d * self.xi[1]

    def Phi_k(self, z1, z2):
        """The generated entropy phi_k z + (grad phi_k . z_perp) z_perp."""
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        p = self.phi_k(z1, z2)
        d = _sk(self._t(z1, z2), self.k, 1)
        q = d * (-self.xi[0] * z2 + self.xi[1] * z1)  # grad phi_k . z_perp
        return p * z1 - q * z2, p * z2 + q * z1

    def Phi_xi(self, z1, z2):
        """The pointwise limit: |z|^2 xi on {z . xi > 0}, zero elsewhere."""
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        pos = self._t(z1, z2) > 0.0
        r2 = z1 ** 2 + z2 ** 2
        return np.where(pos, r2 * self.xi[0], 0.0), np.where(pos, r2 * self.xi[1], 0.0)

    def psi_k(self, z1, z2) -> np.ndarray:
        """grad(Delta phi_k)(z) . z_perp / 4 = s_k'''(z . xi) (xi . z_perp) / 4."""
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        self._assert_inside_cutoff(z1, z2)
        d3 = _sk(self._t(z1, z2), self.k, 3)
        return d3 * (-self.xi[0] * z2 + self.xi[1] * z1) / 4.0


def special_xi_entropy(xi, k: int) -> SpecialEntropyXi:
    """Validated constructor; xi must be unit and k >= 1."""
    xi = np.asarray(xi, dtype=float)
    if abs(np.hypot(*xi) - 1.0) > 1e-12:
        raise ValueError("xi must be a unit vector")
    if k < 1:
        raise ValueError("approximation index k must be >= 1")
    return SpecialEntropyXi((float(xi[0]), float(xi[1])), int(k))


@dataclass(frozen=True)
class ChiKBound:
    """Dense-sampling certificate for sup |psi_k(z) / (z1 z2)| on the circle."""

    sup_ratio: float
    alpha: float
    psi_sup: float

    @property
    def classical_bound(self) -> float:
        """4 ||psi_k||_inf / alpha^2, the two-case estimate the sup refines."""
        return 4.0 * self.psi_sup / self.alpha ** 2


def chi_k_bound(se: SpecialEntropyXi, n_samples: int = 1 << 15) -> ChiKBound:
    """Certify boundedness of psi_k(z) / (z1 z2) on the unit circle.

    Requires xi off the coordinate axes and k large enough that the circle
    band {0 <= z . xi <= 1/k} carrying psi_k clears the axes, otherwise the
    quotient is genuinely unbounded and a HypothesisError is raised.
    """
    xi = np.asarray(se.xi)
    if min(abs(xi[0]), abs(xi[1])) < 1e-9:
        raise HypothesisError("xi must avoid the coordinate axes")
    # band on the circle: angular distance to the two points z . xi = 0
    half_width = np.arcsin(min(1.0 / se.k, 1.0))
    perp_angle = np.arctan2(xi[0], -xi[1])  # angle of xi_perp
    axis_angles = np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2])
    clearance = np.inf
    for base in (perp_angle, perp_angle + np.pi):
        d = np.abs((axis_angles - base + np.pi) % (2 * np.pi) - np.pi)
        clearance = min(clearance, float(np.min(d)))
    if clearance <= half_width:
        raise HypothesisError("support of psi_k on the circle touches the axes; increase k")
    theta = (np.arange(n_samples) + 0.5) * (2 * np.pi / n_samples)
    z1 = np.cos(theta)
    z2 = np.sin(theta)
    psi = se.psi_k(z1, z2)
    support = psi != 0.0
    denom = z1 * z2
    ratio = np.zeros_like(psi)
    ratio[support] = np.abs(psi[support] / denom[support])
    alpha = float(np.min(np.minimum(np.abs(z1), np.abs(z2))[support])) if np.any(support) else np.inf
    return ChiKBound(sup_ratio=float(np.max(ratio)),
                     alpha=alpha,
                     psi_sup=float(np.max(np.abs(psi))))
