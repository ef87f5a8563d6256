"""Panel quadrature over (possibly improper) intervals on the positive half-line.

Integrals are evaluated with fixed-order Gauss-Legendre rules on geometrically
spaced panels. Improper endpoints (0 or infinity) are handled by walking panels
toward the endpoint until consecutive contributions pass a Cauchy criterion;
exhausting the panel budget without decay is reported as divergence, which for
this package is a legitimate answer rather than a failure.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import defaults


@lru_cache(maxsize=8)
def _gauss_rule(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def panel_nodes(a, b, n=defaults.QUAD_NODES):
    """Gauss-Legendre nodes and weights mapped to the finite panel [a, b]."""
    x, w = _gauss_rule(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _finite_edges(a, b, breakpoints=()):
    """Panel edges on finite [a, b] > 0: breakpoints honored, geometric fill-in."""
    pts = [a, b]
    for t in breakpoints:
        if a < t < b:
            pts.append(float(t))
    pts = sorted(set(pts))
    edges = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        if lo > 0.0 and hi / lo > 2.0:
            k = int(math.ceil(math.log2(hi / lo)))
            edges.extend(lo * (hi / lo) ** (np.arange(1, k + 1) / k))
        else:
            edges.append(hi)
    return np.asarray(edges, dtype=float)


def _sum_panels(f, edges, n_nodes):
    total = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = panel_nodes(lo, hi, n_nodes)
        total += np.sum(w * f(x))
    return total


def integrate_positive(
    f,
    a,
    b,
    *,
    breakpoints=(),
    panels=defaults.QUAD_PANELS,
    tol=defaults.QUAD_TOL,
    n_nodes=defaults.QUAD_NODES,
    max_width=None,
):
    """Integrate a vectorized ``f`` over [a, b], 0 <= a < b <= inf.

    Returns ``(value, converged)``. ``converged`` is False when the walk toward
    an improper endpoint fails the Cauchy criterion within the panel budget, or
    when the running total stops being finite. ``max_width`` caps panel widths
    (used for oscillatory integrands).
    """
    a = float(a)
    b = float(b)
    if not 0.0 <= a < b:
        raise ValueError(f"bad interval [{a}, {b}]")

    total = 0.0 + 0.0j
    ok = True

    def add_panel(lo, hi):
        nonlocal total
        if max_width is not None and hi - lo > max_width:
            # cap keeps oscillatory refinement affordable on very wide panels;
            # beyond it the error is bounded by the local mass
            sub = min(int(math.ceil((hi - lo) / max_width)), 256)
            sub_edges = np.linspace(lo, hi, sub + 1)
            c = _sum_panels(f, sub_edges, n_nodes)
        else:
            x, w = panel_nodes(lo, hi, n_nodes)
            c = np.sum(w * f(x))
        total += c
        return c

    def walk(panel_at):
        """Run panels toward an improper endpoint with geometric tail closure.

        Power-law integrands give geometrically decaying panel contributions,
        so the remaining tail is projected as c * r/(1-r); the walk stops when
        either consecutive contributions pass the plain Cauchy test or the
        projected total stabilizes. Failure to do either within the budget is
        divergence.
        """
        nonlocal total
        prev_c = None
        prev_proj = None
        for k in range(panels):
            c = panel_at(k)
            scale = tol * (abs(total) + 1e-300)
            if abs(c) <= scale and prev_c is not None and abs(prev_c) <= scale:
                return True
            geometric = (
                prev_c is not None
                and c.imag == 0.0
                and prev_c.imag == 0.0
                and c.real * prev_c.real > 0.0
                and abs(c) < 0.95 * abs(prev_c)
            )
            if geometric:
                rate = abs(c) / abs(prev_c)
                projected = total + c * rate / (1.0 - rate)
                if prev_proj is not None and abs(projected - prev_proj) <= tol * (
                    abs(projected) + 1e-300
                ):
                    total = projected
                    return True
                prev_proj = projected
            else:
                prev_proj = None
            prev_c = c
        return False

    lo = a
    hi = b if math.isfinite(b) else max(a, 1.0)

    # walk toward 0 when the interval touches it
    if lo == 0.0:
        head_top = min(hi, 1.0)
        if breakpoints:
            inner = [t for t in breakpoints if 0.0 < t < head_top]
            if inner:
                head_top = min(inner)
        converged = walk(
            lambda k: complex(add_panel(head_top * 2.0 ** (-k - 1), head_top * 2.0 ** (-k)))
        )
        ok = ok and converged and bool(np.isfinite(total))
        lo = head_top

    # finite middle section
    mid_hi = hi
    if lo < mid_hi:
        edges = _finite_edges(lo, mid_hi, breakpoints)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            add_panel(e0, e1)
        ok = ok and bool(np.isfinite(total))

    # walk toward infinity when unbounded above
    if not math.isfinite(b):
        base = hi
        converged = walk(lambda k: complex(add_panel(base * 2.0**k, base * 2.0 ** (k + 1))))
        ok = ok and converged and bool(np.isfinite(total))

    if abs(total.imag) == 0.0:
        return total.real, ok
    return total, ok
