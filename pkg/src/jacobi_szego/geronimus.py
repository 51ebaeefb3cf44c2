"""Geronimus relations between Verblunsky coefficients and Jacobi parameters.

Indexing conventions used throughout:

* ``alpha[j]`` is the Verblunsky coefficient alpha_j, j >= 0.  The boundary
  values alpha_{-1} (normally -1) and alpha_{-2} (irrelevant, normally 0) are
  kept as separate fields.
* Jacobi parameters are 1-based: ``a[0]`` is a_1.  Entries past the stored
  range are a_n = 1, b_n = 0.
* Tail sums lambda_n, kappa_n are 0-based ``DecaySeq`` objects.

The inverse problem recovers alpha_0, alpha_1, ... from the tail sums with
n >= 1.  Those equations never involve alpha_{-1} or alpha_{-2}; the n = 0
entries of lambda and kappa only fix the top row (a_1, b_1).  A solved
sequence therefore describes an operator that agrees with the input except,
possibly, in its first row and column.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, MaxIterExceeded, NoContraction, NonpositiveA
from .seqspace import DecaySeq, SpaceSpec, norm, tail_sums

log = logging.getLogger(__name__)

__all__ = [
    "VerblunskySeq",
    "JacobiParams",
    "SolverOptions",
    "forward",
    "k_map",
    "l_map",
    "expanded_tails",
    "f_map",
    "solve",
    "strip_and_solve",
    "verblunsky_norm",
]


@dataclass(frozen=True)
class VerblunskySeq:
    alpha: np.ndarray
    alpha_minus1: float = -1.0
    alpha_minus2: float = 0.0
    # set by the inverse solver: the sequence belongs to an operator whose
    # first row/column may differ from the one the tail sums came from
    modified_top_row: bool = False
    iterations: int | None = None
    residual: float | None = None

    def __post_init__(self):
        vals = np.array(self.alpha, dtype=float).reshape(-1)
        if not np.all(np.isfinite(vals)):
            raise ValueError("Verblunsky coefficients must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "alpha", vals)

    def __len__(self) -> int:
        return self.alpha.size

    def check_domain(self) -> None:
        if self.alpha.size and np.max(np.abs(self.alpha)) >= 1.0:
            raise DomainError("Verblunsky coefficients must satisfy |alpha_n| < 1")

    def padded(self, length: int) -> np.ndarray:
        """alpha_{-2}, alpha_{-1}, alpha_0, ..., zero-padded to ``length`` entries past index -2."""
        ext = np.zeros(max(length, self.alpha.size + 2))
        ext[0] = self.alpha_minus2
        ext[1] = self.alpha_minus1
        ext[2 : 2 + self.alpha.size] = self.alpha
        return ext

    def trimmed(self) -> "VerblunskySeq":
        nz = np.flatnonzero(self.alpha)
        end = nz[-1] + 1 if nz.size else 0
        return replace(self, alpha=self.alpha[:end])

    def to_json(self) -> dict:
        return {"alpha": [float(x) for x in self.alpha], "alpha_minus1": float(self.alpha_minus1)}

    @classmethod
    def from_json(cls, obj) -> "VerblunskySeq":
        if isinstance(obj, list):
            obj = {"alpha": obj}
        if not isinstance(obj, dict) or "alpha" not in obj:
            raise ValueError("Verblunsky JSON must be a list or an object with an 'alpha' list")
        vals = obj["alpha"]
        if not isinstance(vals, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals
        ):
            raise ValueError("'alpha' must be a list of real numbers")
        am1 = obj.get("alpha_minus1", -1.0)
        if not isinstance(am1, (int, float)) or isinstance(am1, bool):
            raise ValueError("'alpha_minus1' must be a real number")
        return cls(np.array(vals, dtype=float), float(am1))


@dataclass(frozen=True)
class JacobiParams:
    """Half-line Jacobi matrix with diagonal b and off-diagonal a (both 1-based)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        b = np.array(self.b, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("Jacobi parameters must be finite")
        if np.any(a <= 0):
            raise NonpositiveA("Jacobi off-diagonal entries must be positive")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def free(cls) -> "JacobiParams":
        return cls(np.ones(0), np.zeros(0))

    @property
    def length(self) -> int:
        """Number of leading rows that may differ from the free operator."""
        return max(self.a.size, self.b.size)

    def a_at(self, n: int) -> float:
        return float(self.a[n - 1]) if 1 <= n <= self.a.size else 1.0

    def b_at(self, n: int) -> float:
        return float(self.b[n - 1]) if 1 <= n <= self.b.size else 0.0

    def arrays(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        """(a_1..a_size, b_1..b_size) with the free tail filled in."""
        a = np.ones(size)
        b = np.zeros(size)
        na, nb = min(size, self.a.size), min(size, self.b.size)
        a[:na] = self.a[:na]
        b[:nb] = self.b[:nb]
        return a, b

    def stripped(self, n: int) -> "JacobiParams":
        """Remove the first ``n`` rows and columns."""
        if n < 0:
            raise ValueError("strip count must be nonnegative")
        return JacobiParams(self.a[n:], self.b[n:])

    def with_top(self, a1: float, b1: float) -> "JacobiParams":
        a, b = self.arrays(max(self.length, 1))
        a[0], b[0] = a1, b1
        return JacobiParams(a, b)

    def tail_sums(self) -> tuple[DecaySeq, DecaySeq]:
        return tail_sums(DecaySeq(self.a, 1), DecaySeq(self.b, 1))

    @classmethod
    def from_tail_sums(cls, lam: DecaySeq, kap: DecaySeq) -> "JacobiParams":
        """Invert ``tail_sums``: b_{n+1} = lambda_{n+1} - lambda_n, a_{n+1}^2 = 1 + kappa_{n+1} - kappa_n."""
        top = max(lam.stop, kap.stop, 1)
        n = np.arange(0, top)
        b = lam.at(n + 1) - lam.at(n)
        a2 = 1.0 + kap.at(n + 1) - kap.at(n)
        if np.any(a2 <= 0):
            raise NonpositiveA("tail sums give a_n^2 <= 0")
        return cls(np.sqrt(a2), b)

    def to_json(self) -> dict:
        return {"a": [float(x) for x in self.a], "b": [float(x) for x in self.b]}

    @classmethod
    def from_json(cls, obj) -> "JacobiParams":
        if not isinstance(obj, dict) or "a" not in obj or "b" not in obj:
            raise ValueError("operator JSON must have 'a' and 'b' lists")
        return cls(np.array(obj["a"], dtype=float), np.array(obj["b"], dtype=float))


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-12
    max_iter: int = 500
    contraction_check: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def verblunsky_norm(alpha, space: SpaceSpec) -> float:
    """Norm of alpha_0, alpha_1, ... with alpha_j weighted as index j + 1.

    The literal weight |n|^s would ignore alpha_0, which does enter the
    n = 1 tail sums; shifting by one keeps the quadratic estimates honest.
    """
    vals = alpha.alpha if isinstance(alpha, VerblunskySeq) else np.asarray(alpha, dtype=float)
    return norm(DecaySeq(vals, 1), space)


def forward(alpha: VerblunskySeq) -> JacobiParams:
    """a_{n+1}^2 = (1-alpha_{2n-1})(1-alpha_{2n}^2)(1+alpha_{2n+1}),
    b_{n+1} = (1-alpha_{2n-1}) alpha_{2n} - (1+alpha_{2n-1}) alpha_{2n-2}."""
    alpha.check_domain()
    n_top = (alpha.alpha.size + 1) // 2
    ext = alpha.padded(2 * n_top + 4)
    n = np.arange(n_top + 1)
    # ext[j + 2] holds alpha_j
    am = ext[2 * n + 1]  # alpha_{2n-1}
    a0 = ext[2 * n + 2]  # alpha_{2n}
    ap = ext[2 * n + 3]  # alpha_{2n+1}
    am2 = ext[2 * n]  # alpha_{2n-2}
    a_sq = (1.0 - am) * (1.0 - a0 * a0) * (1.0 + ap)
    if np.any(a_sq <= 0):
        raise DomainError("a_n^2 <= 0; alpha_{-1} must lie in [-1, 1)")
    b = (1.0 - am) * a0 - (1.0 + am) * am2
    return JacobiParams(np.sqrt(a_sq), b)


def _kl_terms(ext: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    am = ext[2 * k + 1]
    a0 = ext[2 * k + 2]
    ap = ext[2 * k + 3]
    am2 = ext[2 * k]
    a0sq = a0 * a0
    k_terms = a0sq + am * ap - a0sq * (am - ap) - a0sq * am * ap
    l_terms = am * (a0 + am2)
    return k_terms, l_terms


def _rev_cumsum(x: np.ndarray) -> np.ndarray:
    return np.cumsum(x[::-1])[::-1]


def _kl(alpha: VerblunskySeq) -> tuple[DecaySeq, DecaySeq]:
    n_top = (alpha.alpha.size + 1) // 2
    ext = alpha.padded(2 * n_top + 4)
    k_terms, l_terms = _kl_terms(ext, np.arange(n_top + 1))
    return DecaySeq(_rev_cumsum(k_terms), 0), DecaySeq(_rev_cumsum(l_terms), 0)


def k_map(alpha: VerblunskySeq) -> DecaySeq:
    """K(alpha)_n for n = 0..; the k = 0 term uses the stored alpha_{-1}."""
    return _kl(alpha)[0]


def l_map(alpha: VerblunskySeq) -> DecaySeq:
    """L(alpha)_n = sum_{k>=n} alpha_{2k-1} (alpha_{2k} + alpha_{2k-2})."""
    return _kl(alpha)[1]


def expanded_tails(alpha: VerblunskySeq) -> tuple[DecaySeq, DecaySeq]:
    """(lambda, kappa) with kappa_n = alpha_{2n-1} + K_n and lambda_n = alpha_{2n-2} + L_n."""
    alpha.check_domain()
    kk, ll = _kl(alpha)
    n = np.arange(len(kk))
    ext = alpha.padded(2 * len(kk) + 4)
    kap = ext[2 * n + 1] + kk.values
    lam = ext[2 * n] + ll.values
    return DecaySeq(lam, 0), DecaySeq(kap, 0)


def _n_top(lam: DecaySeq, kap: DecaySeq) -> int:
    if lam.offset < 0 or kap.offset < 0:
        raise ValueError("tail sums are indexed from n = 0")
    return max(lam.stop, kap.stop, 2) - 1


def _f_values(lam_v: np.ndarray, kap_v: np.ndarray, u: np.ndarray) -> np.ndarray:
    """The fixed-point map on alpha_0..alpha_{2N-1} for data lambda_n, kappa_n (n = 1..N)."""
    n_top = lam_v.size
    ext = np.zeros(2 * n_top + 6)
    ext[2 : 2 + u.size] = u
    k_terms, l_terms = _kl_terms(ext, np.arange(1, n_top + 1))
    out = np.empty(2 * n_top)
    out[0::2] = lam_v - _rev_cumsum(l_terms)
    out[1::2] = kap_v - _rev_cumsum(k_terms)
    return out


def f_map(lam: DecaySeq, kap: DecaySeq, beta: DecaySeq) -> DecaySeq:
    """F(beta)_{2n-2} = lambda_n - L(beta)_n, F(beta)_{2n-1} = kappa_n - K(beta)_n for n >= 1.

    ``beta`` holds beta_0, beta_1, ... (offset 0).  Fixed points of F are exactly
    the solutions of the expanded tail equations for n >= 1.
    """
    if beta.offset < 0:
        raise ValueError("beta is indexed from 0")
    n_top = max(_n_top(lam, kap), (beta.stop + 1) // 2 + 1)
    n = np.arange(1, n_top + 1)
    u = beta.at(np.arange(0, 2 * n_top))
    return DecaySeq(_f_values(lam.at(n), kap.at(n), u), 0)


def _distance(d: np.ndarray, space: SpaceSpec | None) -> float:
    if space is None:
        return float(np.max(np.abs(d), initial=0.0))
    return verblunsky_norm(d, space)


def solve(
    lam: DecaySeq,
    kap: DecaySeq,
    opts: SolverOptions | None = None,
    space: SpaceSpec | None = None,
) -> VerblunskySeq:
    """Banach iteration alpha <- F(alpha) from alpha = 0.

    Distances are measured in ``space`` (shifted weights, see
    ``verblunsky_norm``) or in the sup norm when ``space`` is None.  With
    ``contraction_check`` the iteration aborts with ``NoContraction`` unless
    some successive-distance ratio drops below 0.95 within the first 10
    steps, or if the iterates blow up.
    """
    opts = opts or SolverOptions()
    n_top = _n_top(lam, kap)
    n = np.arange(1, n_top + 1)
    lam_v, kap_v = lam.at(n), kap.at(n)
    u = np.zeros(2 * n_top)
    prev_d = None
    contracted = False
    growing = 0
    for it in range(1, opts.max_iter + 1):
        new = _f_values(lam_v, kap_v, u)
        if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > 1e6:
            raise NoContraction(f"iterates blew up at step {it}")
        d = _distance(new - u, space)
        u = new
        if d <= opts.tol:
            residual = _distance(u - _f_values(lam_v, kap_v, u), space)
            out = VerblunskySeq(u, modified_top_row=True, iterations=it, residual=residual)
            out.check_domain()
            log.debug("fixed point after %d iterations, residual %.3e", it, residual)
            return out.trimmed()
        if prev_d is not None and opts.contraction_check:
            ratio = d / prev_d
            if ratio < 0.95:
                contracted = True
            growing = growing + 1 if ratio > 1.0 else 0
            if (it >= 10 and not contracted) or growing >= 10:
                raise NoContraction(
                    f"successive distances not shrinking (step {it}, ratio {ratio:.3f})"
                )
        prev_d = d
    raise MaxIterExceeded(f"no fixed point within {opts.max_iter} iterations")


def strip_and_solve(
    J: JacobiParams, space: SpaceSpec | None = None, opts: SolverOptions | None = None
) -> tuple[int, VerblunskySeq]:
    """Smallest N for which the tail sums of J^(N) admit a fixed-point solution.

    Returns N and the Verblunsky sequence of the operator that agrees with
    J^(N) below its first row.  Only contraction failures trigger another
    strip; MaxIterExceeded propagates, since a contracting iteration that ran
    out of budget says nothing about N.
    """
    lam, kap = J.tail_sums()
    last_err: Exception | None = None
    for n_strip in range(0, J.length + 1):
        lam_n = lam.window(n_strip, max(lam.stop, n_strip + 1)).shift(-n_strip)
        kap_n = kap.window(n_strip, max(kap.stop, n_strip + 1)).shift(-n_strip)
        try:
            return n_strip, solve(lam_n, kap_n, opts, space)
        except (NoContraction, DomainError) as exc:
            log.debug("strip %d failed: %s", n_strip, exc)
            last_err = exc
    raise NoContraction(f"even the fully stripped operator failed: {last_err}")
