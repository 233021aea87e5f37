"""
Finite-n quantities of a random phenomenon: occupancy probabilities ω_h^(n), the generating
polynomials Ω_n, the characteristic functions ψ_n of the success count, and the limiting ψ.

Moment sequences go through finite differences, ω_h^(n) = C(n, h) Δ^{n-h} a_h, which is the
expansion of Ω_n(z) = Ω_n(1 + (z - 1)). Atomic mixtures use the binomial sums directly, so the
two routes check each other.
"""
import cmath
import logging
import math

from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from pydantic import BaseModel, ConfigDict
from scipy.special import gammainc

from phenocalc.src.errors import IndexOutOfRange
from phenocalc.src.moments import check_float_resolution, difference_table, finite_difference
from phenocalc.src.primitives.phenomenon import AtomicMixture, OccupancyRow, Phenomenon, tolerance_for
from phenocalc.src.primitives.scalar import Scalar, binomial, zero

logger = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(np.finfo(float).max)


class RecurrenceWitness(BaseModel):
    """First k where n ω_k^(n-1) = (n-k) ω_k^(n) + (k+1) ω_{k+1}^(n) fails."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    k: int
    lhs: Any
    rhs: Any


def _check_counts(n: int, h: int):
    if n < 0 or h < 0 or h > n:
        raise IndexOutOfRange(f"Need 0 <= h <= n, got h={h}, n={n}.")


def _atomic_row(ph: AtomicMixture, n: int) -> List[Scalar]:
    row = [zero(ph.backend)] * (n + 1)
    for p, w in ph.atoms:
        q = 1 - p
        p_powers = [p ** h for h in range(n + 1)]
        q_powers = [q ** h for h in range(n + 1)]
        for h in range(n + 1):
            row[h] += w * binomial(n, h) * p_powers[h] * q_powers[n - h]
    return row


def occupancy_probability(ph: Phenomenon, n: int, h: int) -> Scalar:
    """ω_h^(n): the probability of exactly h successes in n trials."""
    _check_counts(n, h)
    if isinstance(ph, AtomicMixture):
        return sum((w * binomial(n, h) * p ** h * (1 - p) ** (n - h) for p, w in ph.atoms), zero(ph.backend))
    ph.require_depth(n)
    check_float_resolution(ph, n)
    return binomial(n, h) * finite_difference(ph, n - h, h)


def occupancy_row(ph: Phenomenon, n: int) -> OccupancyRow:
    """The whole distribution [ω_0^(n), ..., ω_n^(n)]."""
    _check_counts(n, 0)
    if isinstance(ph, AtomicMixture):
        probs = _atomic_row(ph, n)
    else:
        check_float_resolution(ph, n)
        table = difference_table(ph, n)
        probs = [binomial(n, h) * table[n - h][h] for h in range(n + 1)]
    return OccupancyRow(n=n, probs=tuple(probs), backend=ph.backend)


def aggregate(row: OccupancyRow, m: int) -> OccupancyRow:
    """
    Marginal row over the first m of the n trials:
    ω_k^(m) = Σ_{h=k}^{n-m+k} ω_h^(n) C(h, k) C(n-h, m-k) / C(n, m).
    """
    n = row.n
    _check_counts(n, m)
    total = binomial(n, m)
    probs = []
    for k in range(m + 1):
        acc = zero(row.backend)
        for h in range(k, n - m + k + 1):
            acc += row[h] * binomial(h, k) * binomial(n - h, m - k)
        probs.append(acc / total)
    return OccupancyRow(n=m, probs=tuple(probs), backend=row.backend)


def pascal_witness(lower: Sequence[Scalar], upper: Sequence[Scalar], tolerance: float = 0.0) -> Optional[RecurrenceWitness]:
    """
    Checks n ω_k^(n-1) = (n-k) ω_k^(n) + (k+1) ω_{k+1}^(n) between two consecutive rows given as
    plain sequences, returning the first failing k.
    """
    n = len(upper) - 1
    if len(lower) != n:
        raise IndexOutOfRange(f"Rows of length {len(lower)} and {len(upper)} are not consecutive.")
    for k in range(n):
        lhs = n * lower[k]
        rhs = (n - k) * upper[k] + (k + 1) * upper[k + 1]
        if abs(lhs - rhs) > tolerance * n:
            return RecurrenceWitness(n=n, k=k, lhs=lhs, rhs=rhs)
    return None


def check_pascal_recurrence(ph: Phenomenon, n: int) -> Optional[RecurrenceWitness]:
    """None when the recurrence between rows n-1 and n holds for all k, else the first witness."""
    if n < 1:
        raise IndexOutOfRange(f"The recurrence links rows n-1 and n, so n >= 1; got {n}.")
    witness = pascal_witness(occupancy_row(ph, n - 1).probs, occupancy_row(ph, n).probs, tolerance_for(ph.backend))
    if witness is not None:
        logger.debug(f"Recurrence failed at n={n}, k={witness.k}.")
    return witness


def omega_polynomial(ph: Phenomenon, n: int) -> List[Scalar]:
    """Coefficients of Ω_n(1 + z) = Σ C(n, h) ω_h^(h) z^h (the n-th polynomial of ψ)."""
    return [binomial(n, h) * a for h, a in enumerate(ph.moments(n))]


def expand_at_shift(coefficients: Sequence[Scalar]) -> List[Scalar]:
    """
    Given the coefficients c_h of a polynomial P(z), returns those of P(z - 1).
    Applied to omega_polynomial this recovers Σ ω_h^(n) z^h.
    """
    degree = len(coefficients) - 1
    out = []
    for k in range(degree + 1):
        acc = coefficients[k] * 0
        for h in range(k, degree + 1):
            term = coefficients[h] * binomial(h, k)
            acc = acc - term if (h - k) % 2 else acc + term
        out.append(acc)
    return out


def psi_n_eval(ph: Phenomenon, n: int, t: float) -> complex:
    """ψ_n(t) = Σ_h ω_h^(n) e^{iht}, the characteristic function of the success count over n trials."""
    if n < 0:
        raise IndexOutOfRange(f"Trial count must be nonnegative, got {n}.")
    if t == 0:
        ph.require_depth(n)
        return complex(1.0, 0.0)
    if isinstance(ph, AtomicMixture):
        step = cmath.exp(1j * t)
        return complex(sum(float(w) * (1 - float(p) + float(p) * step) ** n for p, w in ph.atoms))
    probs = np.array([float(x) for x in occupancy_row(ph, n).probs])
    return complex(np.exp(1j * t * np.arange(n + 1)) @ probs)


def psi_n_grid(ph: Phenomenon, n: int, ts: np.ndarray) -> np.ndarray:
    """Vectorized ψ_n over an array of arguments."""
    ts = np.asarray(ts, dtype=float)
    if isinstance(ph, AtomicMixture):
        out = np.zeros(ts.shape, dtype=complex)
        for p, w in ph.atoms:
            out += float(w) * (1 - float(p) + float(p) * np.exp(1j * ts)) ** n
        return out
    probs = np.array([float(x) for x in occupancy_row(ph, n).probs])
    return np.exp(1j * np.outer(ts, np.arange(n + 1))) @ probs


def _tail_bound(t: float, truncation: int) -> float:
    """Σ_{h > N} |t|^h / h!, which bounds the truncation error since every ω_h^(h) <= 1."""
    x = abs(t)
    if x == 0:
        return 0.0
    # Σ_{h>N} x^h / h! = e^x P(N+1, x), P the regularized lower incomplete gamma
    fraction = float(gammainc(truncation + 1, x))
    if fraction == 0.0:
        return 0.0
    log_tail = x + math.log(fraction)
    return math.inf if log_tail > LOG_FLOAT_MAX else math.exp(log_tail)


def psi_eval(ph: Phenomenon, t: float, truncation: Optional[int] = None) -> Tuple[complex, float]:
    """
    ψ(t) = Σ_h ω_h^(h) (it)^h / h!, with a rigorous bound on the neglected tail.

    Atomic mixtures use the closed form Σ λ_i e^{i p_i t} with zero error.
    """
    if t == 0:
        return complex(1.0, 0.0), 0.0
    if isinstance(ph, AtomicMixture):
        return complex(sum(float(w) * cmath.exp(1j * float(p) * t) for p, w in ph.atoms)), 0.0
    truncation = ph.depth if truncation is None else truncation
    ph.require_depth(truncation)
    total = complex(0.0, 0.0)
    term = complex(1.0, 0.0)
    for h, a in enumerate(ph.moments(truncation)):
        if h > 0:
            term *= 1j * t / h
        total += float(a) * term
    return total, _tail_bound(t, truncation)


def psi_grid(ph: Phenomenon, ts: np.ndarray, truncation: Optional[int] = None) -> np.ndarray:
    return np.array([psi_eval(ph, float(t), truncation)[0] for t in np.asarray(ts, dtype=float)])


def max_psi_gap(ph: Phenomenon, n: int, ts: np.ndarray, truncation: Optional[int] = None) -> float:
    """max over the grid of |ψ_n(t/n) - ψ(t)|, the distance along which ψ_n(t/n) tends to ψ(t)."""
    ts = np.asarray(ts, dtype=float)
    return float(np.max(np.abs(psi_n_grid(ph, n, ts / n) - psi_grid(ph, ts, truncation))))
