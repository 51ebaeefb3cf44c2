"""Weighted sequence spaces l^p_s, tail sums and the tail-product estimate.

Sequences are finitely supported: everything outside the stored window is
exactly zero, so every norm and tail sum below is a finite, exact sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import NonpositiveA

__all__ = [
    "DecaySeq",
    "SpaceSpec",
    "L11",
    "L21",
    "INTERSECTION",
    "norm",
    "tail_sums",
    "tail_product",
    "partial_norm_profile",
    "dyadic_truncations",
]


@dataclass(frozen=True)
class DecaySeq:
    """Real sequence ``values[i]`` living at index ``offset + i``; zero elsewhere."""

    values: np.ndarray
    offset: int = 0

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(vals)):
            raise ValueError("DecaySeq values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "offset", int(self.offset))

    @classmethod
    def zeros(cls, length: int, offset: int = 0) -> "DecaySeq":
        return cls(np.zeros(length), offset)

    @classmethod
    def delta(cls, n: int, value: float = 1.0) -> "DecaySeq":
        return cls(np.array([value]), n)

    def __len__(self) -> int:
        return self.values.size

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.values.size)

    @property
    def stop(self) -> int:
        """One past the last stored index."""
        return self.offset + self.values.size

    def at(self, n) -> np.ndarray | float:
        """Entry (or entries) at absolute index ``n``; zero outside storage."""
        n_arr = np.asarray(n)
        pos = n_arr - self.offset
        inside = (pos >= 0) & (pos < self.values.size)
        out = np.zeros(n_arr.shape)
        if self.values.size:
            out[inside] = self.values[pos[inside]]
        return out if out.ndim else float(out)

    def window(self, start: int, stop: int) -> "DecaySeq":
        """Re-store the sequence on ``start <= n < stop`` (entries outside are dropped)."""
        return DecaySeq(self.at(np.arange(start, max(start, stop))), start)

    def shift(self, k: int) -> "DecaySeq":
        """Same values, indices moved up by ``k``."""
        return DecaySeq(self.values, self.offset + k)

    def scaled(self, c: float) -> "DecaySeq":
        return DecaySeq(c * self.values, self.offset)

    def __add__(self, other: "DecaySeq") -> "DecaySeq":
        lo = min(self.offset, other.offset)
        hi = max(self.stop, other.stop)
        idx = np.arange(lo, hi)
        return DecaySeq(self.at(idx) + other.at(idx), lo)

    def __sub__(self, other: "DecaySeq") -> "DecaySeq":
        return self + other.scaled(-1.0)

    def allclose(self, other: "DecaySeq", atol: float) -> bool:
        return float(np.max(np.abs((self - other).values), initial=0.0)) <= atol

    def to_json(self) -> dict:
        return {"offset": self.offset, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj) -> "DecaySeq":
        """Accept ``{"offset": int, "values": [...]}`` or a bare list (offset 0)."""
        if isinstance(obj, dict):
            if "values" not in obj:
                raise ValueError("DecaySeq JSON needs a 'values' key")
            offset = obj.get("offset", 0)
            if not isinstance(offset, int) or isinstance(offset, bool):
                raise ValueError("DecaySeq offset must be an integer")
            return cls(_as_real_list(obj["values"]), offset)
        return cls(_as_real_list(obj), 0)


def _as_real_list(vals) -> np.ndarray:
    if not isinstance(vals, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals
    ):
        raise ValueError("expected a list of real numbers")
    return np.array(vals, dtype=float)


@dataclass(frozen=True)
class SpaceSpec:
    """Either l^p_s (p in {1, 2}, s >= 0) or the intersection l^2_1 with l^1."""

    kind: str = "lp"
    p: int = 1
    s: float = 1.0

    def __post_init__(self):
        if self.kind not in ("lp", "intersection"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == "lp":
            if self.p not in (1, 2):
                raise ValueError("p must be 1 or 2")
            if not self.s >= 0:
                raise ValueError("weight exponent s must be >= 0")

    @classmethod
    def lp(cls, p: int, s: float) -> "SpaceSpec":
        return cls("lp", p, float(s))

    @classmethod
    def intersection(cls) -> "SpaceSpec":
        return cls("intersection", 2, 1.0)

    @classmethod
    def parse(cls, text: str) -> "SpaceSpec":
        """Parse ``l11``, ``l21``, ``intersection`` or ``l1s:<s>``."""
        text = text.strip().lower()
        if text == "l11":
            return cls.lp(1, 1.0)
        if text == "l21":
            return cls.lp(2, 1.0)
        if text == "intersection":
            return cls.intersection()
        if text.startswith("l1s:"):
            try:
                s = float(text[4:])
            except ValueError:
                raise ValueError(f"bad weight in {text!r}") from None
            return cls.lp(1, s)
        raise ValueError(f"unrecognised space {text!r}")

    @property
    def label(self) -> str:
        if self.kind == "intersection":
            return "intersection"
        if self.s == 1.0:
            return f"l{self.p}1"
        return f"l{self.p}s:{self.s:g}"


L11 = SpaceSpec.lp(1, 1.0)
L21 = SpaceSpec.lp(2, 1.0)
INTERSECTION = SpaceSpec.intersection()


def _weighted(idx: np.ndarray, vals: np.ndarray, p: int, s: float) -> float:
    # |n|^s literally: the n = 0 entry carries weight 0 unless s == 0
    w = np.abs(idx).astype(float) ** s
    total = float(np.sum(w * np.abs(vals) ** p))
    return total if p == 1 else float(np.sqrt(total))


def coeff_norm(idx: np.ndarray, vals: np.ndarray, space: SpaceSpec) -> float:
    """Norm of the coefficient family ``vals`` sitting at integer indices ``idx``."""
    if space.kind == "intersection":
        return _weighted(idx, vals, 2, 1.0) + _weighted(idx, vals, 1, 0.0)
    return _weighted(idx, vals, space.p, space.s)


def norm(seq: DecaySeq, space: SpaceSpec) -> float:
    return coeff_norm(seq.indices, seq.values, space)


def tail_sums(a: DecaySeq, b: DecaySeq) -> tuple[DecaySeq, DecaySeq]:
    """lambda_n = -sum_{k>n} b_k and kappa_n = -sum_{k>n} (a_k^2 - 1), n = 0..N.

    ``a`` and ``b`` are indexed from 1 as Jacobi parameters; unstored ``a``
    entries count as 1 and unstored ``b`` entries as 0.
    """
    if np.any(a.values <= 0):
        raise NonpositiveA("Jacobi off-diagonal entries must be positive")
    last = max(a.stop, b.stop, 1) - 1
    k = np.arange(1, last + 1)
    a_k = np.where((k >= a.offset) & (k < a.stop), a.at(k), 1.0)
    excess = a_k * a_k - 1.0
    lam = np.zeros(last + 1)
    kap = np.zeros(last + 1)
    # reversed cumulative sums: entry n collects k = n+1..last
    lam[:-1] = -np.cumsum(b.at(k)[::-1])[::-1]
    kap[:-1] = -np.cumsum(excess[::-1])[::-1]
    return DecaySeq(lam, 0), DecaySeq(kap, 0)


def tail_product(beta: DecaySeq, gamma: DecaySeq) -> DecaySeq:
    """eta_n = sum_{k>=n} beta_k gamma_k, stored from min(0, offsets) up to the support end."""
    lo = min(0, beta.offset, gamma.offset)
    hi = max(beta.stop, gamma.stop, lo + 1)
    idx = np.arange(lo, hi)
    prod = beta.at(idx) * gamma.at(idx)
    return DecaySeq(np.cumsum(prod[::-1])[::-1], lo)


def dyadic_truncations(limit: int) -> list[int]:
    """1, 2, 4, ... up to and including the largest power of two <= limit."""
    out = [1]
    while out[-1] * 2 <= limit:
        out.append(out[-1] * 2)
    return out


def partial_norm_profile(
    idx: np.ndarray, vals: np.ndarray, space: SpaceSpec, truncations: Iterable[int]
) -> list[float]:
    """Norms of the family restricted to |n| <= T for each truncation T."""
    idx = np.asarray(idx)
    vals = np.asarray(vals)
    return [coeff_norm(idx[np.abs(idx) <= t], vals[np.abs(idx) <= t], space) for t in truncations]


def profile_growth(profile: Sequence[float], scale: float = 0.0) -> float:
    """Increase over the last dyadic step relative to max(final value, scale).

    0 means the profile is flat.  ``scale`` is the size of the object being
    profiled (e.g. the unweighted l^1 norm of all its coefficients); it keeps
    rounding noise in a profile whose weighted norm is itself near zero from
    reading as growth.
    """
    if len(profile) < 2:
        return 0.0
    last, prev = profile[-1], profile[-2]
    denom = max(last, scale)
    if denom <= 0.0:
        return 0.0
    return max(last - prev, 0.0) / denom
