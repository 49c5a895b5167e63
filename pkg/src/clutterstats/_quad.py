"""Deterministic adaptive Gauss-Kronrod quadrature on finite intervals.

Shared integration engine: the Mellin oracle, the Bessel-K kernel and the
Weibull-Nakagami density all integrate through :func:`adaptive_quad`.
Everything here is deterministic (no randomized rules), so repeated runs
produce bit-identical results for identical inputs.
"""

from __future__ import annotations

import heapq

import numpy as np

__all__ = ["NonConvergenceError", "adaptive_quad", "gk15"]

# 15-point Kronrod rule with embedded 7-point Gauss rule, QUADPACK dqk15
# constants.  Nodes are on [-1, 1]; even-indexed nodes carry the Gauss rule.
_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_W_KRONROD = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_W_GAUSS = np.zeros(15)
_W_GAUSS[1::2] = [0.129484966168870, 0.279705391489277, 0.381830050505119,
                  0.417959183673469, 0.381830050505119, 0.279705391489277,
                  0.129484966168870]


class NonConvergenceError(RuntimeError):
    """Raised when the subdivision budget runs out before the tolerance.

    Carries the best available estimate and its error bound so callers can
    degrade gracefully or report diagnostics.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


def gk15(f, a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 15 panel on [a, b]: (integral, error estimate)."""
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    y = np.asarray(f(x), dtype=float)
    ik = half * float(y @ _W_KRONROD)
    ig = half * float(y @ _W_GAUSS)
    return ik, abs(ik - ig)


def adaptive_quad(
    f,
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    max_subdivisions: int = 2000,
    initial_edges=None,
) -> tuple[float, float]:
    """Globally adaptive bisection of [a, b] using GK15 panels.

    ``f`` must accept a numpy array of abscissas and return values of
    the same shape.  ``initial_edges``, when given, is a sorted sequence of
    interior break points seeding the first panels (useful when the caller
    knows where the integrand mass sits).  Returns ``(value, error_bound)``
    and raises :class:`NonConvergenceError` if the subdivision budget is
    exhausted first.
    """
    if not (b > a):
        raise ValueError(f"invalid interval [{a}, {b}]")
    edges = [a, b]
    if initial_edges is not None:
        edges = sorted({a, b, *(float(e) for e in initial_edges if a < e < b)})

    # heap entries ordered by -error, with an insertion counter as a
    # deterministic tie-breaker
    heap: list[tuple[float, int, float, float, float, float]] = []
    counter = 0
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = gk15(f, lo, hi)
        heapq.heappush(heap, (-err, counter, lo, hi, val, err))
        counter += 1
        total += val
        total_err += err

    subdivisions = len(heap)
    while total_err > max(abs_tol, rel_tol * abs(total)):
        if subdivisions >= max_subdivisions:
            raise NonConvergenceError(
                f"adaptive quadrature hit the subdivision limit "
                f"({max_subdivisions}); estimate {total!r} with error bound "
                f"{total_err:.3e}",
                estimate=total,
                error_bound=total_err,
            )
        neg_err, _, lo, hi, val, err = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # interval at floating-point resolution; keep its estimate
            heapq.heappush(heap, (0.0, counter, lo, hi, val, 0.0))
            counter += 1
            total_err -= err
            continue
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        total += (v1 + v2) - val
        total_err += (e1 + e2) - err
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2, e2))
        counter += 2
        subdivisions += 1

    return total, total_err
