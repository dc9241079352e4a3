"""Quadrature engine shared by every transform, norm, and inversion routine.

All integrals in this package reduce to one of three patterns:

* a tensor-product rule over a truncated box (``integrate``),
* a batch of 1-D windowed rules, one interval per evaluation point, used by
  the transforms to concentrate nodes where the integrand actually lives,
* panel rules (geometric / octave edges) for slowly decaying integrands.

Node counts for windowed rules scale with the window width relative to a
reference width, so a thin support slice at an extreme slope still gets an
adequate node density without paying for it everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

#: Evaluation batches are chunked to roughly this many scalar evaluations.
CHUNK = 4_000_000

_RULES = ("gauss", "trapezoid")


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for every numerical integral.

    Parameters
    ----------
    rule:
        ``"gauss"`` (tensor Gauss-Legendre) or ``"trapezoid"``.
    R_max:
        Truncation radius for integrals over unbounded domains when the
        integrand carries no support box of its own.
    m:
        Nodes per axis at the reference width.
    eps:
        Inner cutoff for singular-limit integrals.
    eps_schedule:
        Strictly decreasing positive cutoffs used to extrapolate the
        singular limit.
    """

    rule: str = "gauss"
    R_max: float = 8.0
    m: int = 200
    eps: float = 0.05
    eps_schedule: tuple = (0.2, 0.1, 0.05, 0.025)

    def __post_init__(self):
        if self.rule not in _RULES:
            raise QuadratureError(f"unknown rule {self.rule!r}; expected one of {_RULES}")
        if self.m < 2:
            raise QuadratureError("m must be >= 2")
        if not self.R_max > 0:
            raise QuadratureError("R_max must be positive")
        if not self.eps > 0:
            raise QuadratureError("eps must be positive")
        sched = tuple(float(e) for e in self.eps_schedule)
        if any(e <= 0 for e in sched):
            raise QuadratureError("eps_schedule entries must be positive")
        if any(b >= a for a, b in zip(sched, sched[1:])):
            raise QuadratureError("eps_schedule must be strictly decreasing")
        object.__setattr__(self, "eps_schedule", sched)

    @classmethod
    def for_dimension(cls, n: int, **overrides) -> "QuadratureSpec":
        """Default spec at desk scale: m=200 per axis in n=2, m=80 in n>=3."""
        params = {"m": 200 if n <= 2 else 80}
        params.update(overrides)
        return cls(**params)

    def with_(self, **overrides) -> "QuadratureSpec":
        return replace(self, **overrides)


@lru_cache(maxsize=256)
def gauss_rule(m: int):
    """Gauss-Legendre nodes and weights on [-1, 1], cached per node count."""
    x, w = np.polynomial.legendre.leggauss(int(m))
    return x, w


def line_rule(a: float, b: float, m: int, rule: str = "gauss"):
    """Nodes and weights integrating over [a, b]."""
    if rule == "gauss":
        x, w = gauss_rule(m)
        half = 0.5 * (b - a)
        return a + half * (x + 1.0), half * w
    x = np.linspace(a, b, m)
    w = np.full(m, (b - a) / (m - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return x, w


def panel_rule(edges, nodes_per_panel: int):
    """Concatenated Gauss-Legendre panels over consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    xs, ws = [], []
    gx, gw = gauss_rule(nodes_per_panel)
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        xs.append(a + half * (gx + 1.0))
        ws.append(half * gw)
    return np.concatenate(xs), np.concatenate(ws)


def octave_edges(start: float, stop: float, factor: float = 2.0):
    """Geometric edges from start to stop (last panel clipped at stop)."""
    if not (stop > start > 0):
        raise QuadratureError("octave_edges needs 0 < start < stop")
    edges = [start]
    while edges[-1] * factor < stop:
        edges.append(edges[-1] * factor)
    edges.append(stop)
    return np.asarray(edges)


def eval_chunked(func, pts: np.ndarray) -> np.ndarray:
    """Apply a batched scalar function to an (N, k) point array in chunks."""
    n = pts.shape[0]
    if n == 0:
        return np.zeros(0)
    step = max(1, CHUNK // max(1, pts.shape[1] if pts.ndim > 1 else 1))
    if n <= step:
        return np.asarray(func(pts), dtype=float)
    out = np.empty(n)
    for i in range(0, n, step):
        out[i:i + step] = func(pts[i:i + step])
    return out


def integrate(integrand, k: int, spec: QuadratureSpec) -> float:
    """Tensor-product quadrature of ``integrand`` over [-R_max, R_max]^k.

    ``integrand`` maps a k-vector to a real; batched callables accepting an
    (N, k) array (or (N,) when k == 1) are used directly, scalar callables
    are looped.
    """
    if k < 1:
        raise QuadratureError("dimension k must be >= 1")
    if spec.m ** k > 2e8:
        raise QuadratureError(f"tensor rule too large: m={spec.m}, k={k}")
    x, w = line_rule(-spec.R_max, spec.R_max, spec.m, spec.rule)
    if k == 1:
        pts = x
        weights = w
    else:
        grids = np.meshgrid(*([x] * k), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        wgrids = np.meshgrid(*([w] * k), indexing="ij")
        weights = np.ones(pts.shape[0])
        for g in wgrids:
            weights *= g.ravel()

    vals = _eval_integrand(integrand, pts, k)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.argmax(bad))
        node = (float(pts[i]),) if k == 1 else tuple(float(v) for v in pts[i])
        raise QuadratureError(f"non-finite integrand value at node {node}", node=node)
    return float(np.dot(vals, weights))


def _eval_integrand(integrand, pts, k):
    try:
        vals = np.asarray(integrand(pts), dtype=float)
        if vals.shape == (pts.shape[0],):
            return vals
    except Exception:
        pass
    # scalar fallback, one point at a time
    if k == 1:
        return np.array([float(integrand(float(p))) for p in pts])
    return np.array([float(integrand(np.asarray(p))) for p in pts])


def window_buckets(lo, hi, m_ref: int, width_ref: float, min_nodes: int = 44,
                   max_nodes: int | None = None):
    """Bucket a batch of intervals by the node count their width warrants.

    Returns a list of ``(idx, nodes, weights)`` with ``nodes``/``weights`` of
    shape (len(idx), m_bucket). Intervals with hi <= lo are dropped (their
    contribution is zero). The floor keeps narrow windows resolved: a window
    cut down by a slab constraint still holds a full feature of the
    integrand, so its node count must not shrink with its width.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if max_nodes is None:
        max_nodes = m_ref
    widths = hi - lo
    valid = widths > 0
    if not valid.any():
        return []
    want = np.ceil(m_ref * widths / max(width_ref, 1e-300))
    want = np.clip(want, min_nodes, max_nodes).astype(int)
    # quantize to min_nodes * 2^j so only a handful of tensor shapes occur
    tiers = np.ceil(np.log2(np.maximum(want / min_nodes, 1.0))).astype(int)
    out = []
    for tier in np.unique(tiers[valid]):
        m = min(min_nodes * 2 ** int(tier), max_nodes)
        idx = np.nonzero(valid & (tiers == tier))[0]
        gx, gw = gauss_rule(m)
        half = 0.5 * widths[idx]
        mid = lo[idx] + half
        nodes = mid[:, None] + half[:, None] * gx[None, :]
        weights = half[:, None] * gw[None, :]
        out.append((idx, nodes, weights))
    return out


def tier_counts(lo, hi, m_ref: int, width_ref: float, min_nodes: int = 44,
                max_nodes: int | None = None):
    """Quantized per-interval node counts for multi-axis window grouping.

    Returns (valid, counts): intervals with hi <= lo are invalid; counts are
    min_nodes * 2^j so that joint (axis1, axis2, ...) tensor shapes collapse
    to a handful of groups.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if max_nodes is None:
        max_nodes = m_ref
    widths = hi - lo
    valid = widths > 0
    want = np.ceil(m_ref * np.maximum(widths, 0) / max(width_ref, 1e-300))
    want = np.clip(want, min_nodes, max_nodes)
    tiers = np.ceil(np.log2(np.maximum(want / min_nodes, 1.0))).astype(int)
    counts = np.minimum(min_nodes * 2 ** tiers, max_nodes)
    return valid, counts


def mapped_rule(lo, hi, m: int):
    """Gauss-Legendre nodes/weights mapped to each [lo_i, hi_i] row: (B, m)."""
    gx, gw = gauss_rule(m)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    nodes = (lo + half)[:, None] + half[:, None] * gx[None, :]
    return nodes, half[:, None] * gw[None, :]


def sphere_nodes(d: int, m: int):
    """Quadrature nodes/weights for the unit sphere S^d embedded in R^{d+1}.

    d=1 uses uniform angles (spectral for periodic integrands); d>=2 uses a
    Gauss-Legendre rule in the polar cosine against the recursive rule on
    S^{d-1}. Weights sum to the sphere area.
    """
    if d == 1:
        ang = (np.arange(m) + 0.5) * (2 * np.pi / m)
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        return pts, np.full(m, 2 * np.pi / m)
    c, wc = gauss_rule(m)
    sub_pts, sub_w = sphere_nodes(d - 1, m)
    sin_pol = np.sqrt(1.0 - c ** 2)
    pts = np.concatenate([
        (sin_pol[:, None, None] * sub_pts[None, :, :]).reshape(-1, d),
        np.repeat(c, sub_pts.shape[0])[:, None],
    ], axis=1)
    w = (wc * sin_pol ** (d - 2))[:, None] * sub_w[None, :]
    return pts, w.ravel()
