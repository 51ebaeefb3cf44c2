"""Fourier series on the circle: algebra norms, conjugate functions, and
analytic calculus (exp / log / reciprocal) carried out grid-pointwise.

A series is stored as two-sided coefficients c_n, n = -N..N, for a grid of
``grid_size = 2N`` points, with f(theta) = sum_n c_n exp(i n theta).  Sample
grids are uniform, theta_j = 2 pi (j + shift) / grid_size; the measures
module uses the half-shifted grid (shift = 1/2) so that no node lands on
theta = 0 or pi.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, RangeViolation
from .seqspace import SpaceSpec, coeff_norm, dyadic_truncations, partial_norm_profile, profile_growth

__all__ = [
    "FourierSeries",
    "theta_grid",
    "analyze",
    "synthesize",
    "algebra_norm",
    "hilbert",
    "analytic_calculus",
    "conjugate_pair",
    "in_algebra",
]

DEFAULT_GRID = 4096
ALIASING_TOL = 1e-8


def _check_grid(m: int) -> None:
    if m < 2 or m & (m - 1):
        raise GridMismatch(f"grid size must be a power of two, got {m}")


def theta_grid(m: int, shift: float = 0.0) -> np.ndarray:
    return 2.0 * np.pi * (np.arange(m) + shift) / m


@dataclass(frozen=True)
class FourierSeries:
    coeffs: np.ndarray
    grid_size: int
    shift: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size % 2 == 0:
            raise ValueError("coefficient array must have odd length 2N + 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def indices(self) -> np.ndarray:
        n = self.degree
        return np.arange(-n, n + 1)

    def coeff(self, n: int) -> complex:
        if abs(n) > self.degree:
            return 0j
        return complex(self.coeffs[n + self.degree])

    @classmethod
    def from_dict(cls, coeffs: dict[int, complex], grid_size: int = DEFAULT_GRID) -> "FourierSeries":
        n = grid_size // 2
        c = np.zeros(2 * n + 1, dtype=complex)
        for k, v in coeffs.items():
            c[k + n] = v
        return cls(c, grid_size)

    @classmethod
    def constant(cls, value: complex, grid_size: int = DEFAULT_GRID) -> "FourierSeries":
        return cls.from_dict({0: value}, grid_size)

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1])), initial=0.0) <= tol)

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        _same_grid(self, other)
        return FourierSeries(self.coeffs + other.coeffs, self.grid_size, self.shift)

    def __mul__(self, other):
        if isinstance(other, FourierSeries):
            _same_grid(self, other)
            # exact Cauchy product, then cut back to the grid's band
            full = np.convolve(self.coeffs, other.coeffs)
            n = self.degree
            return FourierSeries(full[n : 3 * n + 1], self.grid_size, self.shift)
        return FourierSeries(self.coeffs * other, self.grid_size, self.shift)

    __rmul__ = __mul__

    def tail_fraction(self) -> float:
        """Share of the l^1 coefficient mass carried by the top 10% of frequencies."""
        total = float(np.sum(np.abs(self.coeffs)))
        if total == 0.0:
            return 0.0
        cut = int(np.ceil(0.9 * self.degree))
        return float(np.sum(np.abs(self.coeffs[np.abs(self.indices) > cut]))) / total

    def to_json(self) -> dict:
        return {
            "coeffs_re": [float(x) for x in self.coeffs.real],
            "coeffs_im": [float(x) for x in self.coeffs.imag],
            "offset": -self.degree,
        }

    @classmethod
    def from_json(cls, obj, grid_size: int | None = None) -> "FourierSeries":
        re = np.array(obj["coeffs_re"], dtype=float)
        im = np.array(obj["coeffs_im"], dtype=float)
        if re.shape != im.shape:
            raise ValueError("coeffs_re and coeffs_im differ in length")
        if obj.get("offset", -(re.size // 2)) != -(re.size // 2):
            raise ValueError("offset must equal -N for 2N + 1 coefficients")
        return cls(re + 1j * im, grid_size or (re.size - 1))


def _same_grid(f: FourierSeries, g: FourierSeries) -> None:
    if f.grid_size != g.grid_size or f.coeffs.size != g.coeffs.size or f.shift != g.shift:
        raise GridMismatch("series live on different grids")


def analyze(samples, shift: float = 0.0) -> FourierSeries:
    """Discrete Fourier coefficients of samples on theta_j = 2 pi (j + shift) / M.

    The Nyquist coefficient is split evenly between n = +M/2 and n = -M/2 so
    that real samples give conjugate-symmetric coefficients.
    """
    x = np.asarray(samples)
    m = x.size
    _check_grid(m)
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    raw = np.fft.fft(x) / m
    half = m // 2
    n = np.arange(-half, half + 1)
    c = raw[n % m].astype(complex)
    c[0] *= 0.5
    c[-1] *= 0.5
    if shift:
        c *= np.exp(-1j * n * 2.0 * np.pi * shift / m)
    return FourierSeries(c, m, shift)


def synthesize(f: FourierSeries, grid_size: int | None = None, shift: float | None = None) -> np.ndarray:
    """Evaluate the series on its own grid (or a finer one of the same shift)."""
    m = f.grid_size if grid_size is None else grid_size
    _check_grid(m)
    sh = f.shift if shift is None else shift
    if m < 2 * f.degree:
        raise GridMismatch(f"grid of {m} points cannot carry degree {f.degree}")
    n = f.indices
    c = f.coeffs * np.exp(1j * n * 2.0 * np.pi * sh / m) if sh else np.array(f.coeffs)
    spectrum = np.zeros(m, dtype=complex)
    np.add.at(spectrum, n % m, c)
    return np.fft.ifft(spectrum) * m


def algebra_norm(f: FourierSeries, space: SpaceSpec) -> float:
    """Weighted norm of the two-sided coefficient sequence (weight |n|^s)."""
    return coeff_norm(f.indices, f.coeffs, space)


def hilbert(f: FourierSeries) -> FourierSeries:
    """Conjugate function: multiplier -i sign(n), zero on the mean."""
    return FourierSeries(-1j * np.sign(f.indices) * f.coeffs, f.grid_size, f.shift)


def conjugate_pair(re_f: FourierSeries) -> FourierSeries:
    """Imaginary boundary part of the analytic function whose real part is ``re_f``."""
    if not re_f.is_real(1e-10):
        raise ValueError("conjugate_pair expects a real-valued series")
    return hilbert(re_f)


def _continuous_log(values: np.ndarray) -> np.ndarray:
    mag = np.abs(values)
    if np.min(mag) <= 1e-8:
        raise RangeViolation("log needs values bounded away from 0")
    phase = np.unwrap(np.angle(values))
    # closing the loop must not wind around the origin
    step = np.angle(values[0] / values[-1])
    winding = (phase[-1] + step - phase[0]) / (2.0 * np.pi)
    if abs(winding) > 0.5:
        raise RangeViolation("values wind around 0; no continuous logarithm")
    return np.log(mag) + 1j * phase


def analytic_calculus(f: FourierSeries, op: str) -> FourierSeries:
    """Apply exp, log or reciprocal pointwise on the grid and re-analyze.

    ``op`` is one of ``"exp"``, ``"log"``, ``"reciprocal"``.  A RuntimeWarning
    is issued when the top 10% of frequencies carry more than 1e-8 of the
    result's coefficient mass (the grid is too coarse for the result).
    """
    op = op.lower()
    vals = synthesize(f)
    if op == "exp":
        out = np.exp(vals)
    elif op == "log":
        out = _continuous_log(vals)
    elif op == "reciprocal":
        if np.min(np.abs(vals)) <= 1e-8:
            raise RangeViolation("reciprocal needs values bounded away from 0")
        out = 1.0 / vals
    else:
        raise ValueError(f"unknown operation {op!r}")
    if f.is_real(1e-12) and (op != "log" or np.all(vals.real > 0)):
        out = out.real
    res = analyze(out, f.shift)
    if res.tail_fraction() > ALIASING_TOL:
        warnings.warn(
            f"{op}: top-band coefficient share {res.tail_fraction():.2e} exceeds {ALIASING_TOL:g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return res


@dataclass(frozen=True)
class AlgebraDiagnostic:
    truncations: list[int]
    profile: list[float]
    growth: float
    flat: bool


def in_algebra(f: FourierSeries, space: SpaceSpec, window: int | None = None, flat_tol: float = 1e-3) -> AlgebraDiagnostic:
    """Partial-norm growth across dyadic truncations |n| <= 1, 2, 4, ...

    A flat profile is only *consistent* with membership; finite data cannot
    decide it.
    """
    truncs = dyadic_truncations(window or f.degree)
    prof = partial_norm_profile(f.indices, f.coeffs, space, truncs)
    g = profile_growth(prof, float(np.sum(np.abs(f.coeffs))))
    return AlgebraDiagnostic(truncs, prof, g, g <= flat_tol)
