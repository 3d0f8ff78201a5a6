"""Scalar analysis of the recurrent tanh update x -> tanh(w*x + v).

For fixed recurrent weight w > 0 and input offset v, the update map is
``h(x) = tanh(w*x + v)`` and its fixpoints are the zeros of
``g(x) = x - h(x)``.  Two regimes exist:

* Contractive (w <= 1): g is strictly increasing, so h has exactly one
  fixpoint.
* Bistable (w > 1): g has exactly two stationary points, a local maximum
  followed by a local minimum, so h has one, two, or three fixpoints
  depending on v.

In the bistable regime there are two distinguished offsets v_plus < v_minus
at which g is tangent to the axis (a double root at the local minimum,
respectively maximum).  The tangency abscissae are the *pivots*
p_minus = -p_plus.  Every fixpoint of every offset v sits in a fixed
position relative to the pivots, which is what makes the three-way digit
classification below well defined:

    digit 1:  x <= p_minus
    digit 2:  p_minus < x < p_plus
    digit 3:  p_plus <= x

Closed forms used here (validated against an independent tangency oracle
in the test suite):

    p_plus = sqrt(1 - 1/w)
    v_plus = artanh(p_plus) - w * p_plus
    stationary points of g at x = (+-arcosh(sqrt(w)) - v) / w
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ContractiveRegime, NoConvergence

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**6

# Root finding knobs: bisection is the guaranteed stage, Newton the polish.
BISECTION_DEPTH = 200
NEWTON_STEPS = 20
RESIDUAL_TARGET = 1e-12

# |g| below this at an interval endpoint counts as a root sitting exactly on
# a stationary point (the tangent, double-root case).
_ENDPOINT_ZERO = 1e-13
# Distinct roots handed back by adjacent intervals are merged below this.
_DEDUPE_TOL = 1e-9


class Regime(Enum):
    CONTRACTIVE = "contractive"  # w <= 1
    BISTABLE = "bistable"        # w > 1


@dataclass(frozen=True)
class NeuronShape:
    """Recurrent weight of one neuron together with its qualitative regime."""

    w: float

    def __post_init__(self):
        if not self.w > 0:
            raise ValueError(f"recurrent weight must be positive, got {self.w}")

    @property
    def regime(self) -> Regime:
        return Regime.BISTABLE if self.w > 1 else Regime.CONTRACTIVE


@dataclass(frozen=True)
class PivotPair:
    """Tangency data of the bistable regime.

    ``p_minus < 0 < p_plus`` are the pivots; ``v_minus > v_plus`` are the
    offsets at which g has a double root at the respective pivot.
    """

    p_minus: float
    p_plus: float
    v_minus: float
    v_plus: float


@dataclass(frozen=True)
class FixpointSet:
    """Sorted fixpoints of one scalar update, with their digit classes."""

    points: tuple
    digits: tuple

    def __post_init__(self):
        if not 1 <= len(self.points) <= 3:
            raise ValueError(f"expected 1-3 fixpoints, got {len(self.points)}")
        if len(self.points) != len(self.digits):
            raise ValueError("points and digits must have equal length")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ValueError("fixpoints must be strictly increasing")


class _AmbiguousType:
    """Singleton returned by :func:`classify` near a pivot."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Ambiguous"


AMBIGUOUS = _AmbiguousType()


def h(w: float, v: float, x: float) -> float:
    """The update map tanh(w*x + v)."""
    return math.tanh(w * x + v)


def g(w: float, v: float, x: float) -> float:
    """x - tanh(w*x + v); zeros are the fixpoints of the update."""
    return x - math.tanh(w * x + v)


def g_prime(w: float, v: float, x: float) -> float:
    """Derivative 1 - w * sech^2(w*x + v), written via tanh for stability."""
    t = math.tanh(w * x + v)
    return 1.0 - w * (1.0 - t * t)


def pivots(w: float) -> PivotPair:
    """Pivot abscissae and tangent offsets for a bistable weight.

    Raises ContractiveRegime for w <= 1, where g is globally increasing and
    no tangency exists.
    """
    if w <= 1:
        raise ContractiveRegime(f"pivots undefined for w={w} <= 1")
    p_plus = math.sqrt(1.0 - 1.0 / w)
    v_plus = math.atanh(p_plus) - w * p_plus
    return PivotPair(p_minus=-p_plus, p_plus=p_plus,
                     v_minus=-v_plus, v_plus=v_plus)


def stationary_points(w: float, v: float) -> tuple:
    """The two zeros of g' for w > 1, in increasing order.

    g'(x) = 1 - w*sech^2(w*x + v) vanishes where cosh(w*x + v) = sqrt(w),
    i.e. at x = (+-arcosh(sqrt(w)) - v) / w.
    """
    if w <= 1:
        raise ContractiveRegime(f"stationary points undefined for w={w} <= 1")
    r = math.acosh(math.sqrt(w))
    return ((-r - v) / w, (r - v) / w)


def classify(x: float, piv: PivotPair, margin: float = 0.0):
    """Digit of x relative to the pivots; AMBIGUOUS within margin of either.

    Boundaries are closed toward digits 1 and 3: x == p_minus is digit 1 and
    x == p_plus is digit 3 (only reachable with margin == 0).
    """
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if abs(x - piv.p_minus) < margin or abs(x - piv.p_plus) < margin:
        return AMBIGUOUS
    if x <= piv.p_minus:
        return 1
    if x < piv.p_plus:
        return 2
    return 3


def _bisect(w: float, v: float, lo: float, hi: float,
            g_lo: float, g_hi: float) -> float:
    """Bisection on a monotone piece of g with a sign change across it."""
    for _ in range(BISECTION_DEPTH):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        g_mid = g(w, v, mid)
        if g_mid == 0.0:
            return mid
        if (g_mid < 0.0) == (g_lo < 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    return 0.5 * (lo + hi)


def _newton_polish(w: float, v: float, x: float, tol: float) -> float:
    """Local Newton refinement of a root of g; never worsens the residual."""
    best_x, best_r = x, abs(g(w, v, x))
    for _ in range(NEWTON_STEPS):
        if best_r <= min(tol, RESIDUAL_TARGET):
            break
        d = g_prime(w, v, best_x)
        if abs(d) < 1e-14:
            break  # double root: bisection already placed us on it
        cand = best_x - g(w, v, best_x) / d
        r = abs(g(w, v, cand))
        if r < best_r:
            best_x, best_r = cand, r
        else:
            break
    return best_x


def fixpoints(w: float, v: float, tol: float = DEFAULT_TOL) -> FixpointSet:
    """All fixpoints of x -> tanh(w*x + v), found by bracketed bisection.

    The search runs independently on each monotone piece of g inside
    [-1, +1] (one piece when w <= 1, up to three delimited by the
    stationary points when w > 1), then polishes each root with Newton.
    Total for w > 0: g(-1) < 0 < g(+1) always holds, so at least one root
    exists.
    """
    if not w > 0:
        raise ValueError(f"weight must be positive, got {w}")
    if not tol > 0:
        raise ValueError("tol must be positive")

    if w <= 1:
        breakpoints = [-1.0, 1.0]
    else:
        s_lo, s_hi = stationary_points(w, v)
        breakpoints = [-1.0]
        for s in (s_lo, s_hi):
            if -1.0 < s < 1.0:
                breakpoints.append(s)
        breakpoints.append(1.0)

    values = [g(w, v, b) for b in breakpoints]
    roots = []
    for i in range(len(breakpoints) - 1):
        lo, hi = breakpoints[i], breakpoints[i + 1]
        g_lo, g_hi = values[i], values[i + 1]
        if abs(g_lo) <= _ENDPOINT_ZERO:
            roots.append(_newton_polish(w, v, lo, tol))
            continue
        if abs(g_hi) <= _ENDPOINT_ZERO:
            # handled when the next interval starts, except for the last one
            if i == len(breakpoints) - 2:
                roots.append(_newton_polish(w, v, hi, tol))
            continue
        if (g_lo < 0.0) != (g_hi < 0.0):
            roots.append(_newton_polish(w, v, _bisect(w, v, lo, hi, g_lo, g_hi), tol))

    roots.sort()
    deduped = []
    for r in roots:
        if not deduped or r - deduped[-1] > _DEDUPE_TOL:
            deduped.append(r)

    if w > 1:
        piv = pivots(w)
        digits = tuple(classify(x, piv, margin=0.0) for x in deduped)
    else:
        digits = (2,) * len(deduped)  # unique fixpoint: constant digit
    return FixpointSet(points=tuple(deduped), digits=digits)


def _settle_scalar_steps(w: float, v: float, x0: float,
                         tol: float, max_iter: int) -> tuple:
    """Iterate x -> tanh(w*x + v) to the step criterion; returns (x, steps).

    A Newton polish on g follows the iteration so that slowly converging
    near-tangent configurations still land on the fixpoint to full
    precision.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    x = x0
    for step in range(1, max_iter + 1):
        x_next = math.tanh(w * x + v)
        if abs(x_next - x) <= tol:
            return _newton_polish(w, v, x_next, tol), step
        x = x_next
    raise NoConvergence(
        f"no convergence after {max_iter} iterations (w={w}, v={v}, x0={x0})",
        iterations=max_iter,
    )


def settle_scalar(w: float, v: float, x0: float,
                  tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Limit of the iteration x -> tanh(w*x + v) started at x0.

    The iteration always converges to a fixpoint (monotone bounded map);
    NoConvergence only signals an exhausted iteration budget.
    """
    x, _ = _settle_scalar_steps(w, v, x0, tol, max_iter)
    return x
