"""Orthogonal polynomials on the unit circle.

Szego recursion, Bernstein-Szego weights, Verblunsky coefficients from
moments, and a decay comparison between alpha and the Fourier coefficients
of log w.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MomentDegenerate
from .geronimus import VerblunskySeq
from .harmonic import DEFAULT_GRID, analytic_calculus, analyze, theta_grid
from .measures import CircleMeasure
from .seqspace import SpaceSpec, dyadic_truncations, partial_norm_profile, profile_growth

__all__ = [
    "szego_recursion",
    "szego_polynomials",
    "bernstein_szego",
    "resolving_grid",
    "verblunsky_from_measure",
    "verify_gi_baxter",
    "GiBaxterReport",
]


def _alpha_array(alpha) -> np.ndarray:
    a = alpha.alpha if isinstance(alpha, VerblunskySeq) else np.asarray(alpha)
    return np.asarray(a, dtype=complex)


def szego_polynomials(alpha, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Monic Phi_n and Phi_n^* as coefficient arrays (index = power of z)."""
    a = _alpha_array(alpha)
    n = a.size if n is None else n
    if np.any(np.abs(a[:n]) >= 1.0):
        raise DomainError("Szego recursion needs |alpha_k| < 1")
    phi = np.zeros(n + 1, dtype=complex)
    star = np.zeros(n + 1, dtype=complex)
    phi[0] = star[0] = 1.0
    for k in range(n):
        ak = a[k] if k < a.size else 0.0
        z_phi = np.roll(phi, 1)  # z * Phi_k (degree k < n, so no wraparound)
        phi, star = z_phi - np.conj(ak) * star, star - ak * z_phi
    return phi, star


def szego_recursion(alpha, z, n: int, normalized: bool = True):
    """(phi_n(z), phi_n^*(z)), orthonormal unless ``normalized`` is False.

    Phi_{k+1} = z Phi_k - conj(alpha_k) Phi_k^*, Phi_{k+1}^* = Phi_k^* - alpha_k z Phi_k.
    """
    a = _alpha_array(alpha)
    if np.any(np.abs(a[:n]) >= 1.0):
        raise DomainError("Szego recursion needs |alpha_k| < 1")
    zz = np.asarray(z, dtype=complex)
    p = np.ones_like(zz)
    q = np.ones_like(zz)
    for k in range(n):
        ak = a[k] if k < a.size else 0.0
        p, q = zz * p - np.conj(ak) * q, q - ak * zz * p
    if normalized:
        rho = np.sqrt(np.prod(1.0 - np.abs(a[:n]) ** 2))
        p, q = p / rho, q / rho
    return p, q


def resolving_grid(alpha, base: int = DEFAULT_GRID, cap: int = 1 << 20) -> int:
    """Smallest power-of-two grid >= base on which the Bernstein-Szego weight does not alias.

    The Fourier coefficients of 1/|Phi_n^*|^2 decay like r^|k|, r the largest
    zero modulus of Phi_n; the grid is doubled until r^M < 1e-17.
    """
    a = _alpha_array(alpha)
    m = base
    if a.size == 0:
        return m
    phi, _ = szego_polynomials(a)
    zeros = np.roots(phi[::-1])
    r = float(np.max(np.abs(zeros), initial=0.0))
    while r > 0 and m < cap and m * np.log(r) > np.log(1e-17):
        m *= 2
    if r > 0 and m * np.log(r) > np.log(1e-17):
        warnings.warn(
            f"zero modulus {r:.8f}: a {m}-point grid cannot resolve this weight",
            RuntimeWarning,
            stacklevel=2,
        )
    return m


def bernstein_szego(alpha, grid_size: int | None = None) -> CircleMeasure:
    """w(theta) = prod_k (1 - |alpha_k|^2) / |Phi_n^*(e^{i theta})|^2 for finitely supported alpha.

    Without an explicit ``grid_size`` the grid is the default one, refined
    when zeros of Phi_n crowd the unit circle (see ``resolving_grid``).
    """
    a = _alpha_array(alpha)
    if np.any(np.abs(a) >= 1.0):
        raise DomainError("Bernstein-Szego weight needs |alpha_k| < 1")
    n = a.size
    grid_size = grid_size or resolving_grid(a)
    th = theta_grid(grid_size, 0.5)
    _, star = szego_recursion(a, np.exp(1j * th), n, normalized=False)
    w = np.prod(1.0 - np.abs(a) ** 2) / np.abs(star) ** 2
    return CircleMeasure(w)


def verblunsky_from_measure(mu: CircleMeasure, n: int) -> VerblunskySeq:
    """alpha_0..alpha_{n-1} from the moments by the Szego (Levinson) recursion.

    conj(alpha_k) = <z Phi_k, 1> / ||Phi_k||^2 where the pairing only needs the
    moments c_j = integral of exp(-i j theta) d mu.
    """
    if n > mu.grid_size // 8:
        raise ValueError(f"extraction depth capped at grid/8 = {mu.grid_size // 8}")
    c = mu.moments(n + 1)
    # integral of z^j d mu = conj(c_j)
    zmom = np.conj(c)
    phi = np.array([1.0 + 0j])
    star = np.array([1.0 + 0j])
    nrm = float(c[0].real)
    alpha = np.zeros(n, dtype=complex)
    for k in range(n):
        # integral of z * Phi_k(z) d mu
        s = np.dot(phi, zmom[1 : k + 2])
        ak = np.conj(s / nrm)
        if abs(ak) >= 1.0 - 1e-10:
            raise MomentDegenerate(f"|alpha_{k}| = {abs(ak):.12f}; Toeplitz minors lost positivity")
        alpha[k] = ak
        z_phi = np.concatenate([[0.0], phi])
        star_ext = np.concatenate([star, [0.0]])
        phi, star = z_phi - np.conj(ak) * star_ext, star_ext - ak * z_phi
        nrm *= 1.0 - abs(ak) ** 2
    if np.max(np.abs(alpha.imag), initial=0.0) > 1e-10:
        raise ValueError("complex Verblunsky coefficients; measure is not conjugation invariant")
    return VerblunskySeq(alpha.real)


@dataclass(frozen=True)
class GiBaxterReport:
    space: str
    truncations: list[int]
    alpha_profile: list[float]
    logw_profile: list[float]
    alpha_growth: float
    logw_growth: float
    alpha_flat: bool
    logw_flat: bool

    @property
    def consistent(self) -> bool:
        return self.alpha_flat == self.logw_flat

    def to_json(self) -> dict:
        return {
            "space": self.space,
            "truncations": self.truncations,
            "alpha_profile": self.alpha_profile,
            "logw_profile": self.logw_profile,
            "alpha_growth": self.alpha_growth,
            "logw_growth": self.logw_growth,
            "alpha_flat": self.alpha_flat,
            "logw_flat": self.logw_flat,
            "consistent": self.consistent,
        }


def verify_gi_baxter(
    alpha: VerblunskySeq,
    mu: CircleMeasure,
    space: SpaceSpec,
    window: int | None = None,
    flat_tol: float = 1e-3,
) -> GiBaxterReport:
    """Compare partial-norm growth of alpha with that of the coefficients of log w.

    Both profiles are taken over the dyadic truncations 1, 2, 4, ... up to
    ``window`` (default: grid/8).  A profile is flat when its last dyadic
    step adds at most ``flat_tol`` of its final value.
    """
    if mu.masses:
        raise ValueError("decay comparison needs a purely absolutely continuous measure")
    window = window or mu.grid_size // 8
    truncs = dyadic_truncations(window)
    logw = analytic_calculus(analyze(mu.weight, 0.5), "log")
    a = alpha.alpha
    # alpha_j is weighted as index j + 1, matching the Verblunsky norms elsewhere
    a_prof = partial_norm_profile(np.arange(1, a.size + 1), a, space, truncs)
    w_prof = partial_norm_profile(logw.indices, logw.coeffs, space, truncs)
    ga = profile_growth(a_prof, float(np.sum(np.abs(a))))
    gw = profile_growth(w_prof, float(np.sum(np.abs(logw.coeffs))))
    return GiBaxterReport(
        space=space.label,
        truncations=truncs,
        alpha_profile=a_prof,
        logw_profile=w_prof,
        alpha_growth=ga,
        logw_growth=gw,
        alpha_flat=ga <= flat_tol,
        logw_flat=gw <= flat_tol,
    )
