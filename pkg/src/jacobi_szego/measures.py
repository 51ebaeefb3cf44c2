"""Circle and interval measures and the Szego mapping between them.

Both kinds of measure share one discretisation.  A circle measure stores its
weight w (the density against d theta / 2 pi) on the half-shifted grid
theta_j = 2 pi (j + 1/2) / M.  An interval measure stores its density v at
the image nodes x_j = 2 cos theta_j, j < M/2, which all lie strictly inside
(-2, 2).  Under this pairing the weight relations hold node by node, and the
midpoint rule in theta is the quadrature on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ExponentUndetermined,
    MassAtEdge,
    NotConjugationInvariant,
    OutsideDisc,
    RangeViolation,
    SupportOutsideInterval,
)
from .harmonic import DEFAULT_GRID, FourierSeries, algebra_norm, analyze, in_algebra, theta_grid
from .seqspace import L11, SpaceSpec

__all__ = [
    "CircleMeasure",
    "IntervalMeasure",
    "ClassVReport",
    "szego_forward",
    "szego_inverse",
    "caratheodory",
    "check_class_V",
]

MASS_TOL = 1e-10
_MERGE_TOL = 1e-12


def _check_mass(total: float, what: str) -> None:
    if abs(total - 1.0) > MASS_TOL:
        raise ValueError(f"{what} has total mass {total!r}, expected 1")


def _masses(masses) -> tuple[tuple[float, float], ...]:
    out = []
    for pos, m in masses or ():
        if not m > 0:
            raise ValueError("point masses must be positive")
        out.append((float(pos), float(m)))
    return tuple(out)


@dataclass(frozen=True)
class CircleMeasure:
    """w(theta) d theta / 2 pi on the half-shifted grid plus point masses (theta_k, m_k)."""

    weight: np.ndarray
    masses: tuple[tuple[float, float], ...] = ()
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        w = np.array(self.weight, dtype=float).reshape(-1)
        m = w.size
        if m < 2 or m & (m - 1):
            raise ValueError("grid size must be a power of two")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weight must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weight", w)
        masses = tuple((float(np.mod(t, 2 * np.pi)), mm) for t, mm in _masses(self.masses))
        object.__setattr__(self, "masses", masses)
        if self.check:
            _check_mass(self.total_mass, "circle measure")

    @classmethod
    def from_weight(cls, w: Callable[[np.ndarray], np.ndarray], grid_size: int = DEFAULT_GRID, masses=()) -> "CircleMeasure":
        return cls(w(theta_grid(grid_size, 0.5)), masses)

    @classmethod
    def lebesgue(cls, grid_size: int = DEFAULT_GRID) -> "CircleMeasure":
        return cls(np.ones(grid_size))

    @property
    def grid_size(self) -> int:
        return self.weight.size

    @property
    def nodes(self) -> np.ndarray:
        return theta_grid(self.grid_size, 0.5)

    @property
    def total_mass(self) -> float:
        return float(np.mean(self.weight)) + sum(m for _, m in self.masses)

    @property
    def conjugation_invariant(self) -> bool:
        if not np.allclose(self.weight, self.weight[::-1], rtol=1e-12, atol=1e-14):
            return False
        pending = [(t, m) for t, m in self.masses if not _on_axis(t)]
        while pending:
            t, m = pending.pop()
            partner = next(
                (i for i, (u, mu) in enumerate(pending)
                 if abs(np.mod(u + t, 2 * np.pi)) < _MERGE_TOL or abs(np.mod(u + t, 2 * np.pi) - 2 * np.pi) < _MERGE_TOL),
                None,
            )
            if partner is None or abs(pending[partner][1] - m) > _MERGE_TOL:
                return False
            pending.pop(partner)
        return True

    def integrate(self, h: Callable[[np.ndarray], np.ndarray]) -> complex:
        ac = np.mean(self.weight * h(self.nodes))
        pts = sum(m * h(np.array([t]))[0] for t, m in self.masses)
        return ac + pts

    def moments(self, n: int) -> np.ndarray:
        """c_j = integral of exp(-i j theta) d mu for j = 0..n."""
        if n >= self.grid_size // 2:
            raise ValueError("moment order must stay below half the grid size")
        c = np.fft.fft(self.weight)[: n + 1] / self.grid_size
        j = np.arange(n + 1)
        c = c * np.exp(-1j * np.pi * j / self.grid_size)  # half-shift phase
        for t, m in self.masses:
            c = c + m * np.exp(-1j * j * t)
        return c

    def to_json(self) -> dict:
        return {
            "kind": "circle",
            "grid_size": self.grid_size,
            "weight": [float(x) for x in self.weight],
            "masses": [[t, m] for t, m in self.masses],
        }


def _on_axis(t: float) -> bool:
    t = float(np.mod(t, 2 * np.pi))
    return min(abs(t), abs(t - np.pi), abs(t - 2 * np.pi)) < _MERGE_TOL


@dataclass(frozen=True)
class IntervalMeasure:
    """v(x) dx sampled at x_j = 2 cos theta_j (j < M/2) plus point masses (x_k, m_k).

    ``density=None`` means no absolutely continuous part.
    """

    density: np.ndarray | None
    masses: tuple[tuple[float, float], ...] = ()
    grid_size: int = DEFAULT_GRID
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.density is None:
            v = np.zeros(self.grid_size // 2)
        else:
            v = np.array(self.density, dtype=float).reshape(-1)
            object.__setattr__(self, "grid_size", 2 * v.size)
        m = self.grid_size
        if m < 2 or m & (m - 1):
            raise ValueError("grid size must be a power of two")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("density must be finite and nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "density", v)
        object.__setattr__(self, "masses", _masses(self.masses))
        if self.check:
            _check_mass(self.total_mass, "interval measure")

    @classmethod
    def from_density(cls, v: Callable[[np.ndarray], np.ndarray], grid_size: int = DEFAULT_GRID, masses=()) -> "IntervalMeasure":
        x = interval_nodes(grid_size)
        return cls(v(x), masses, grid_size)

    @property
    def nodes(self) -> np.ndarray:
        return interval_nodes(self.grid_size)

    @property
    def quad_weights(self) -> np.ndarray:
        """Midpoint-rule weights for the integral of g(x) v(x) dx."""
        th = theta_grid(self.grid_size, 0.5)[: self.grid_size // 2]
        return 4.0 * np.pi / self.grid_size * np.sin(th)

    @property
    def ac_mass(self) -> float:
        return float(np.sum(self.quad_weights * self.density))

    @property
    def total_mass(self) -> float:
        return self.ac_mass + sum(m for _, m in self.masses)

    def integrate(self, g: Callable[[np.ndarray], np.ndarray]) -> complex:
        ac = np.sum(self.quad_weights * self.density * g(self.nodes))
        return ac + sum(m * g(np.array([x]))[0] for x, m in self.masses)

    def discrete(self) -> tuple[np.ndarray, np.ndarray]:
        """All quadrature nodes and weights, atoms included."""
        x = np.concatenate([self.nodes, [x for x, _ in self.masses]])
        q = np.concatenate([self.quad_weights * self.density, [m for _, m in self.masses]])
        keep = q > 0
        return x[keep], q[keep]

    def with_mass(self, x: float, m: float) -> "IntervalMeasure":
        """Add a point mass and renormalise to a probability measure."""
        scale = 1.0 / (1.0 + m)
        masses = [(p, w * scale) for p, w in self.masses] + [(x, m * scale)]
        return IntervalMeasure(self.density * scale, masses, self.grid_size)

    def to_json(self) -> dict:
        return {
            "kind": "interval",
            "grid_size": self.grid_size,
            "weight": [float(x) for x in self.density],
            "masses": [[x, m] for x, m in self.masses],
        }


def interval_nodes(grid_size: int) -> np.ndarray:
    return 2.0 * np.cos(theta_grid(grid_size, 0.5)[: grid_size // 2])


def measure_from_json(obj) -> CircleMeasure | IntervalMeasure:
    if not isinstance(obj, dict) or obj.get("kind") not in ("circle", "interval"):
        raise ValueError("measure JSON needs kind 'circle' or 'interval'")
    masses = [tuple(p) for p in obj.get("masses", [])]
    if obj["kind"] == "circle":
        meas = CircleMeasure(np.array(obj["weight"], dtype=float), masses)
    else:
        meas = IntervalMeasure(np.array(obj["weight"], dtype=float), masses)
    if "grid_size" in obj and obj["grid_size"] != meas.grid_size:
        raise ValueError("grid_size does not match the weight length")
    return meas


def _merge(points: Sequence[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    out: list[list[float]] = []
    for x, m in sorted(points):
        if out and abs(out[-1][0] - x) < _MERGE_TOL:
            out[-1][1] += m
        else:
            out.append([x, m])
    return tuple((x, m) for x, m in out)


def szego_forward(mu: CircleMeasure) -> IntervalMeasure:
    """Push mu forward under theta -> 2 cos theta."""
    if not mu.conjugation_invariant:
        raise NotConjugationInvariant("Szego mapping needs a conjugation-invariant measure")
    half = mu.grid_size // 2
    th = mu.nodes[:half]
    v = mu.weight[:half] / (2.0 * np.pi * np.sin(th))
    masses = _merge([(2.0 * np.cos(t), m) for t, m in mu.masses])
    return IntervalMeasure(v, masses, mu.grid_size, check=mu.check)


def szego_inverse(nu: IntervalMeasure) -> CircleMeasure:
    """The conjugation-invariant circle measure whose Szego image is nu."""
    for x, _ in nu.masses:
        if abs(x) > 2.0 + _MERGE_TOL:
            raise SupportOutsideInterval(f"mass at x = {x} lies off [-2, 2]")
    half = nu.grid_size // 2
    th = theta_grid(nu.grid_size, 0.5)[:half]
    w_half = 2.0 * np.pi * np.sin(th) * nu.density
    w = np.concatenate([w_half, w_half[::-1]])
    masses = []
    for x, m in nu.masses:
        t = float(np.arccos(np.clip(x / 2.0, -1.0, 1.0)))
        if _on_axis(t):
            masses.append((t, m))
        else:
            masses.extend([(t, m / 2.0), (2.0 * np.pi - t, m / 2.0)])
    return CircleMeasure(w, masses, check=nu.check)


def caratheodory(mu: CircleMeasure, z):
    """F(z) = integral of (e^{i theta} + z) / (e^{i theta} - z) d mu(theta), |z| < 1.

    The absolutely continuous part is summed as the power series
    c_0 + 2 sum_{n >= 1} c_n z^n in the moments, which stays accurate as
    |z| approaches 1 where direct quadrature of the Poisson-type kernel
    would not; atoms are evaluated exactly.
    """
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) >= 1.0 - 1e-6):
        raise OutsideDisc("Caratheodory function is evaluated inside the unit disc")
    order = mu.grid_size // 2 - 1
    c = np.fft.fft(mu.weight)[: order + 1] / mu.grid_size
    c = c * np.exp(-1j * np.pi * np.arange(order + 1) / mu.grid_size)
    series = 2.0 * c
    series[0] = c[0]
    out = np.polyval(series[::-1], zz)
    for t, m in mu.masses:
        e = np.exp(1j * t)
        out = out + m * (e + zz) / (e - zz)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class ClassVReport:
    l: int
    r: int
    v0: FourierSeries
    log_v0_norm: float
    eigenvalues_ok: bool
    slope_left: float = float("nan")
    slope_right: float = float("nan")
    log_v0_flat: bool = True
    log_v0_profile: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "r": self.r,
            "log_v0_norm": self.log_v0_norm,
            "eigenvalues_ok": self.eigenvalues_ok,
            "slope_left": self.slope_left,
            "slope_right": self.slope_right,
            "log_v0_flat": self.log_v0_flat,
        }


def _exponent(slope: float, side: str) -> int:
    if abs(slope - 0.5) <= 0.2:
        return 1
    if abs(slope + 0.5) <= 0.2:
        return -1
    raise ExponentUndetermined(f"boundary slope {slope:.3f} at the {side} edge is not near +-1/2")


def check_class_V(nu: IntervalMeasure, space: SpaceSpec = L11, window: int | None = None) -> ClassVReport:
    """Detect the edge exponents l, r and analyse log v0 as a function of theta.

    The exponent at each edge comes from a least-squares slope of log v
    against log(2 -+ x) over the outermost 5% of the nodes.
    """
    for x, _ in nu.masses:
        if abs(abs(x) - 2.0) <= _MERGE_TOL:
            raise MassAtEdge(f"point mass at the band edge x = {x}")
    eigenvalues_ok = all(abs(x) > 2.0 for x, _ in nu.masses)
    x = nu.nodes
    v = nu.density
    if np.min(v) <= 0:
        raise RangeViolation("absolutely continuous part must be positive inside (-2, 2)")
    half = x.size
    k = max(int(0.05 * half), 4)
    # nodes run from x near +2 (j = 0) down to x near -2
    slope_right = float(np.polyfit(np.log(2.0 - x[:k]), np.log(v[:k]), 1)[0])
    slope_left = float(np.polyfit(np.log(2.0 + x[-k:]), np.log(v[-k:]), 1)[0])
    r = _exponent(slope_right, "right")
    l = _exponent(slope_left, "left")
    log_v0_half = np.log(v) - 0.5 * l * np.log(2.0 + x) - 0.5 * r * np.log(2.0 - x)
    series = analyze(np.concatenate([log_v0_half, log_v0_half[::-1]]), 0.5)
    diag = in_algebra(series, space, window)
    return ClassVReport(
        l=l,
        r=r,
        v0=series,
        log_v0_norm=algebra_norm(series, space),
        eigenvalues_ok=eigenvalues_ok,
        slope_left=slope_left,
        slope_right=slope_right,
        log_v0_flat=diag.flat,
        log_v0_profile=diag.profile,
    )
