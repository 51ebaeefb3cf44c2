"""Jacobi operators: spectral measures, m- and M-functions, coefficient
stripping, resonance at E = +-2, and the top-row surgery that makes an
operator doubly resonant.

m(E) = <delta_1, (J - E)^{-1} delta_1> and M(z) = -m(z + 1/z) for |z| < 1.
Both continued fractions are closed with the free tail, which is exact for
parameters that are free past the stored range.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    EigenFailure,
    EigenvaluesPresent,
    Inconclusive,
    InvalidC,
    MomentDegenerate,
    NearSpectrum,
    OutsideDisc,
)
from .geronimus import JacobiParams
from .measures import IntervalMeasure

__all__ = [
    "ResonanceData",
    "SurgeryResult",
    "SurgeryReport",
    "spectral_measure",
    "eigenvalues_off_band",
    "m_free",
    "m_contfrac",
    "M_function",
    "strip",
    "stripping_relation",
    "resonance_data",
    "make_doubly_resonant",
    "apply_surgery",
    "jacobi_from_measure",
    "verify_surgery_spectrum",
    "z_of_energy",
]

DENOM_TOL = 1e-12
RADIAL_K = np.arange(4, 15)
DIVERGENCE_LEVEL = 50.0
DIVERGENCE_RATIO = 1.5
CAUCHY_TOL = 1e-6
RICHARDSON_LEVELS = 4
EIG_TRUNCATION = 512
EIG_TOL = 1e-6


def _truncation(J: JacobiParams, n: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = J.arrays(n)
    return b, a[: n - 1]


def spectral_measure(J: JacobiParams, n: int) -> IntervalMeasure:
    """Point-mass measure of the n x n truncation: eigenvalues weighted by
    the squared first components of the normalised eigenvectors."""
    if n < 1:
        raise ValueError("truncation size must be positive")
    d, e = _truncation(J, n)
    try:
        vals, vecs = eigh_tridiagonal(d, e)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    wts = vecs[0, :] ** 2
    wts = wts / wts.sum()
    return IntervalMeasure(None, list(zip(vals.tolist(), wts.tolist())))


def eigenvalues_off_band(J: JacobiParams, n: int = EIG_TRUNCATION, tol: float = EIG_TOL) -> np.ndarray:
    """Eigenvalues of the n x n truncation lying outside [-2 - tol, 2 + tol]."""
    d, e = _truncation(J, max(n, J.length + 1))
    try:
        vals = eigh_tridiagonal(d, e, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return vals[np.abs(vals) > 2.0 + tol]


def m_free(E):
    """m-function of the free operator; the branch with m(E) -> 0 at infinity."""
    E = np.asarray(E, dtype=complex)
    out = 0.5 * (-E + np.sqrt(E - 2.0) * np.sqrt(E + 2.0))
    return out if out.ndim else complex(out)


def m_contfrac(J: JacobiParams, E, depth: int | None = None):
    """m(E) = 1 / (b_1 - E - a_1^2 / (b_2 - E - ...)), closed with the free m-function.

    Exact when ``depth`` covers the non-free part of J (the default).
    """
    E = np.asarray(E, dtype=complex)
    if np.any((np.abs(E.imag) == 0) & (np.abs(E.real) <= 2.0 + 1e-6)):
        raise NearSpectrum("E on or near [-2, 2] on the real axis")
    depth = J.length if depth is None else depth
    if depth < 1:
        depth = 1
    a, b = J.arrays(depth)
    t = np.asarray(m_free(E), dtype=complex)
    for n in range(depth - 1, -1, -1):
        den = b[n] - E - a[n] ** 2 * t
        if np.any(np.abs(den) < DENOM_TOL):
            raise NearSpectrum(f"continued-fraction denominator vanished at level {n + 1}")
        t = 1.0 / den
    return t if t.ndim else complex(t)


def M_function(J: JacobiParams, z, depth: int | None = None):
    """M(z) = -m(z + 1/z) = 1 / (z + 1/z - b_1 - a_1^2 M^(1)(z)), closed with M_free(z) = z.

    Evaluated directly in the disc variable so that real z close to +-1
    stays well conditioned.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0) or np.any(z == 0):
        raise OutsideDisc("M is evaluated for 0 < |z| < 1")
    depth = J.length if depth is None else depth
    a, b = J.arrays(depth)
    energy = z + 1.0 / z
    t = z.copy()
    for n in range(depth - 1, -1, -1):
        den = energy - b[n] - a[n] ** 2 * t
        if np.any(np.abs(den) < DENOM_TOL):
            raise NearSpectrum(f"M recursion denominator vanished at level {n + 1}")
        t = 1.0 / den
    return t if t.ndim else complex(t)


def strip(J: JacobiParams, n: int) -> JacobiParams:
    return J.stripped(n)


def stripping_relation(J: JacobiParams, z) -> float:
    """|M(z) - 1 / (z + 1/z - b_1 - a_1^2 M^(1)(z))|, maximised over the given points."""
    z = np.asarray(z, dtype=complex)
    lhs = M_function(J, z)
    inner = M_function(strip(J, 1), z)
    rhs = 1.0 / (z + 1.0 / z - J.b_at(1) - J.a_at(1) ** 2 * inner)
    return float(np.max(np.abs(lhs - rhs)))


def z_of_energy(E):
    """The z in (-1, 1) with z + 1/z = E, for real |E| > 2."""
    E = np.asarray(E, dtype=float)
    if np.any(np.abs(E) <= 2.0):
        raise ValueError("need |E| > 2")
    return (E - np.sign(E) * np.sqrt(E * E - 4.0)) / 2.0


@dataclass(frozen=True)
class ResonanceData:
    c_plus: float | None
    c_minus: float | None
    k_plus: int
    k_minus: int
    samples_plus: list[float] = field(default_factory=list, repr=False)
    samples_minus: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        for k, c in ((self.k_plus, self.c_plus), (self.k_minus, self.c_minus)):
            if k not in (-1, 1) or (k == -1) != (c is None):
                raise ValueError("k = -1 exactly when the corresponding c is None")

    @property
    def doubly_resonant(self) -> bool:
        return self.k_plus == -1 and self.k_minus == -1

    def to_json(self) -> dict:
        return {
            "c_plus": self.c_plus,
            "c_minus": self.c_minus,
            "k_plus": self.k_plus,
            "k_minus": self.k_minus,
        }


def _radial_samples(fn, side: int) -> np.ndarray:
    r = side * (1.0 - 2.0 ** (-RADIAL_K.astype(float)))
    return np.real(fn(r))


def _classify(vals: np.ndarray, side: str) -> tuple[int, float | None]:
    mags = np.abs(vals)
    ratios = mags[1:] / np.maximum(mags[:-1], 1e-300)
    if mags[-1] >= DIVERGENCE_LEVEL and np.all(ratios[-5:] >= DIVERGENCE_RATIO):
        return -1, None
    limit = _richardson_limit(vals)
    if limit is None:
        raise Inconclusive(f"radial samples at the {side} edge neither diverge nor settle")
    return 1, limit


def _richardson_limit(vals: np.ndarray) -> float | None:
    """Extrapolate samples at spacing h = 2^-k, assuming an expansion in powers of h.

    Each level removes the next power of h.  Levels 2..RICHARDSON_LEVELS are
    tried in turn and the first whose last two values are Cauchy within
    CAUCHY_TOL wins; near-resonant operators have large higher-order terms
    and need the extra levels.
    """
    r = np.asarray(vals, dtype=float)
    for level in range(1, RICHARDSON_LEVELS + 1):
        f = 2.0**level
        r = (f * r[1:] - r[:-1]) / (f - 1.0)
        if r.size < 2:
            break
        if level >= 2 and abs(r[-1] - r[-2]) <= CAUCHY_TOL:
            return float(r[-1])
    return None


def resonance_data(J: JacobiParams, check_eigenvalues: bool = True) -> ResonanceData:
    """Classify M along z = +-(1 - 2^-k), k = 4..14.

    Divergent (k = -1) when |M| exceeds 50 and grows by at least 1.5x per
    step over the last five samples; convergent (k = +1) when some
    Richardson level (2 to 4) has its last two values agreeing to 1e-6, in
    which case that value is c.  Anything else raises Inconclusive.
    """
    if check_eigenvalues:
        off = eigenvalues_off_band(J)
        if off.size:
            raise EigenvaluesPresent(f"eigenvalues off [-2, 2]: {off}")
    plus = _radial_samples(lambda z: M_function(J, z), 1)
    minus = _radial_samples(lambda z: M_function(J, z), -1)
    k_plus, c_plus = _classify(plus, "E = 2")
    k_minus, c_minus = _classify(minus, "E = -2")
    return ResonanceData(c_plus, c_minus, k_plus, k_minus, plus.tolist(), minus.tolist())


@dataclass(frozen=True)
class SurgeryResult:
    a1_new: float
    b1_new: float
    case: tuple[int, int]  # (k_minus, k_plus)
    delta_a: float
    delta_ab: float
    a1: float = 1.0
    b1: float = 0.0

    def __post_init__(self):
        if not self.a1_new > 0:
            raise InvalidC("surgery must produce a positive off-diagonal entry")

    def to_json(self) -> dict:
        return {
            "a1_new": self.a1_new,
            "b1_new": self.b1_new,
            "case": list(self.case),
            "delta_a": self.delta_a,
            "delta_ab": self.delta_ab,
        }


def make_doubly_resonant(a1: float, b1: float, rd: ResonanceData) -> SurgeryResult:
    """New (a_1, b_1) making the operator resonant at both E = 2 and E = -2.

    Only the finite radial limits need adjusting; for each such side the
    new top row must put a zero of 1/M-tilde at that edge.
    """
    if not a1 > 0:
        raise InvalidC("a1 must be positive")
    cm, cp = rd.c_minus, rd.c_plus
    if cp is not None and not cp > 0.25:
        raise InvalidC(f"c_plus = {cp} must exceed 1/4")
    if cm is not None and not cm < -0.25:
        raise InvalidC(f"c_minus = {cm} must be below -1/4")
    a2 = a1 * a1
    case = (rd.k_minus, rd.k_plus)
    if case == (-1, -1):
        new_a2, new_b = a2, b1
    elif case == (1, -1):
        new_a2 = a2 * 4.0 * cm / (4.0 * cm + 1.0)
        new_b = 2.0 * (2.0 * b1 * cm + 1.0) / (4.0 * cm + 1.0)
    elif case == (-1, 1):
        new_a2 = a2 * 4.0 * cp / (4.0 * cp - 1.0)
        new_b = 2.0 * (2.0 * b1 * cp + 1.0) / (4.0 * cp - 1.0)
    else:
        den = 4.0 * cm * cp - cm + cp
        new_a2 = a2 * 4.0 * cm * cp / den
        new_b = 2.0 * (2.0 * b1 * cm * cp + cm + cp) / den
    if not new_a2 > 0:
        raise InvalidC(f"surgery gives a_1^2 = {new_a2}; eigenvalues off [-2, 2]?")
    return SurgeryResult(
        a1_new=float(np.sqrt(new_a2)),
        b1_new=float(new_b),
        case=case,
        delta_a=float(new_a2 - a2),
        delta_ab=float(new_a2 * b1 - a2 * new_b),
        a1=float(a1),
        b1=float(b1),
    )


def apply_surgery(J: JacobiParams, sr: SurgeryResult) -> JacobiParams:
    return J.with_top(sr.a1_new, sr.b1_new)


def jacobi_from_measure(nu: IntervalMeasure, n: int) -> JacobiParams:
    """First n recurrence coefficients of nu.

    Stieltjes procedure carried out as Lanczos on diag(x) with starting
    vector sqrt(q), with full reorthogonalisation.  The plain three-term
    Stieltjes sweep loses all accuracy within a few dozen steps once nu has
    an atom off [-2, 2], where the orthonormal polynomials grow
    geometrically.
    """
    if n > nu.grid_size // 8:
        raise ValueError(f"depth capped at grid/8 = {nu.grid_size // 8}")
    x, q = nu.discrete()
    if x.size <= n:
        raise MomentDegenerate("measure has too few support points for this depth")
    basis = np.zeros((n + 1, x.size))
    basis[0] = np.sqrt(q / q.sum())
    a = np.zeros(n)
    b = np.zeros(n)
    for k in range(n):
        v = basis[k]
        b[k] = np.dot(x * v, v)
        r = x * v - b[k] * v
        if k:
            r -= a[k - 1] * basis[k - 1]
        for _ in range(2):
            r -= basis[: k + 1].T @ (basis[: k + 1] @ r)
        nrm = float(np.linalg.norm(r))
        if not nrm > 1e-14:
            raise MomentDegenerate(f"orthogonal polynomial {k + 1} vanishes on the support")
        a[k] = nrm
        basis[k + 1] = r / nrm
    return JacobiParams(a, b)


@dataclass(frozen=True)
class SurgeryReport:
    f_plus: float | None
    f_minus: float | None
    min_f: float
    zero_free: bool
    passed: bool
    tol: float

    def to_json(self) -> dict:
        return {
            "f_plus": self.f_plus,
            "f_minus": self.f_minus,
            "min_f": self.min_f,
            "zero_free": self.zero_free,
            "passed": self.passed,
        }


def verify_surgery_spectrum(J: JacobiParams, sr: SurgeryResult, tol: float = 1e-8) -> SurgeryReport:
    """f(E) = a1_new^2 + m(E) (delta_a E - delta_ab) must vanish at each edge
    that was nonresonant and stay away from 0 for 2 < |E| <= 10."""

    def f(E):
        return sr.a1_new ** 2 - M_function(J, z_of_energy(E)).real * (sr.delta_a * E - sr.delta_ab)

    grid = np.concatenate([np.linspace(-10.0, -2.0, 801)[:-1], np.linspace(2.0, 10.0, 801)[1:]])
    vals = f(grid)
    zero_free = bool(np.all(vals > 0) or np.all(vals < 0))

    def edge(side: int) -> float:
        # approach along z = +-(1 - h); f is analytic in h there when the side is nonresonant
        z = side * (1.0 - 2.0 ** (-RADIAL_K.astype(float)))
        samples = sr.a1_new ** 2 - M_function(J, z).real * (sr.delta_a * (z + 1.0 / z) - sr.delta_ab)
        lim = _richardson_limit(samples)
        return float(samples[-1] if lim is None else lim)

    k_minus, k_plus = sr.case
    f_plus = edge(1) if k_plus == 1 else None
    f_minus = edge(-1) if k_minus == 1 else None
    edges_ok = all(abs(v) <= tol for v in (f_plus, f_minus) if v is not None)
    return SurgeryReport(
        f_plus=f_plus,
        f_minus=f_minus,
        min_f=float(np.min(np.abs(vals))),
        zero_free=zero_free,
        passed=zero_free and edges_ok,
        tol=tol,
    )
