"""Analytic test functions on R^n and the open upper half-space.

Fields are closures over formulas, never resampled grids: every transform in
this package returns a new field whose evaluation runs quadrature on demand.
Identities between transform chains therefore hold up to quadrature error
only, with no interpolation term.

A field may carry two kinds of support metadata used to place quadrature
nodes:

* ``box``: per-axis interval hull of the support (``None`` = unknown),
* ``section_support``: for fields whose support in the last coordinate
  depends on the leading coordinates, a vectorized map from leading
  coordinates to (lo, hi) bounds of the last-axis support slice.

Both are conservative hints, not hard masks; evaluation outside them simply
returns whatever the formula gives (usually zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

_DOMAINS = ("full", "half")


@dataclass(frozen=True)
class Point:
    """A point x = (x', x_n) of R^n with the last coordinate split off."""

    xprime: tuple
    xn: float

    def __post_init__(self):
        xp = tuple(float(v) for v in np.atleast_1d(self.xprime))
        if len(xp) < 1:
            raise DomainError("Point needs n >= 2, so xprime must be nonempty")
        object.__setattr__(self, "xprime", xp)
        object.__setattr__(self, "xn", float(self.xn))

    @property
    def n(self) -> int:
        return len(self.xprime) + 1

    @classmethod
    def of(cls, coords) -> "Point":
        """Build from a full coordinate sequence (x_1, ..., x_n)."""
        coords = [float(v) for v in coords]
        return cls(tuple(coords[:-1]), coords[-1])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.xprime + (self.xn,), dtype=float)


def _as_points_array(pts, n: int) -> np.ndarray:
    if isinstance(pts, Point):
        pts = pts.as_array()[None, :]
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise DomainError(f"expected points of dimension {n}, got shape {arr.shape}")
    return arr


def _box_union(a, b):
    if a is None or b is None:
        return None
    return tuple((min(la, lb), max(ha, hb)) for (la, ha), (lb, hb) in zip(a, b))


class ScalarField:
    """A real-valued function on R^n or on the half-space x_n > 0.

    ``func`` must accept an (N, n) array and return an (N,) array.
    Evaluation is pure and deterministic; the optional memoization cache is
    idempotent, so concurrent evaluation behaves as if it were absent.
    """

    def __init__(self, n: int, func, domain: str = "full", box=None,
                 section_support=None, decay_radius: float | None = None):
        if n < 2:
            raise DomainError("fields require n >= 2")
        if domain not in _DOMAINS:
            raise ConfigError(f"unknown domain {domain!r}; expected 'full' or 'half'")
        self.n = int(n)
        self.domain = domain
        self._func = func
        self.box = None if box is None else tuple((float(a), float(b)) for a, b in box)
        self.section_support = section_support
        self._decay_radius = decay_radius
        self._cache = None

    @property
    def decay_hint(self) -> float | None:
        """Radius beyond which the field is treated as numerically zero."""
        if self._decay_radius is not None:
            return self._decay_radius
        if self.box is not None:
            return math.sqrt(sum(max(abs(a), abs(b)) ** 2 for a, b in self.box))
        return None

    def eval(self, point) -> float:
        return float(self.eval_array(_as_points_array(point, self.n))[0])

    def __call__(self, point) -> float:
        return self.eval(point)

    def eval_array(self, pts) -> np.ndarray:
        pts = _as_points_array(pts, self.n)
        if self.domain == "half" and pts.shape[0] and np.min(pts[:, -1]) <= 0:
            i = int(np.argmin(pts[:, -1]))
            raise DomainError(
                f"half-space field evaluated at x_n = {pts[i, -1]} <= 0 (point {tuple(pts[i])})")
        if self._cache is not None:
            key = pts.tobytes()
            hit = self._cache.get(key)
            if hit is not None:
                return hit.copy()
        vals = np.asarray(self._func(pts), dtype=float)
        if vals.shape != (pts.shape[0],):
            raise DomainError(f"field func returned shape {vals.shape}, expected ({pts.shape[0]},)")
        if self._cache is not None:
            if len(self._cache) > 64:
                self._cache.clear()
            self._cache[key] = vals.copy()
        return vals

    def with_cache(self) -> "ScalarField":
        out = ScalarField(self.n, self._func, self.domain, self.box,
                          self.section_support, self._decay_radius)
        out._cache = {}
        return out

    # algebra (used by linearity tests); support hints take the union hull
    def _combine(self, other, op):
        if isinstance(other, ScalarField):
            if other.n != self.n or other.domain != self.domain:
                raise DomainError("field algebra requires matching dimension and domain")
            func = lambda pts: op(self._func(pts), other._func(pts))
            return ScalarField(self.n, func, self.domain, _box_union(self.box, other.box))
        c = float(other)
        return ScalarField(self.n, lambda pts: op(self._func(pts), c), self.domain,
                           self.box, self.section_support, self._decay_radius)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, c):
        c = float(c)
        return ScalarField(self.n, lambda pts: c * self._func(pts), self.domain,
                           self.box, self.section_support, self._decay_radius)

    __rmul__ = __mul__


class SphereProfile:
    """A function of (x', r): center on the boundary hyperplane, radius r > 0.

    ``func`` must accept (XP: (N, n-1), R: (N,)) and return (N,).
    ``r_support``, when present, maps XP to (lo, hi) bounds of the r-support.
    """

    def __init__(self, n: int, func, xprime_box=None, r_support=None):
        if n < 2:
            raise DomainError("profiles require n >= 2")
        self.n = int(n)
        self._func = func
        self.xprime_box = (None if xprime_box is None
                           else tuple((float(a), float(b)) for a, b in xprime_box))
        self.r_support = r_support
        self._cache = None

    def eval(self, xprime, r: float) -> float:
        xp = np.atleast_1d(np.asarray(xprime, dtype=float))[None, :]
        return float(self.eval_array(xp, np.asarray([r], dtype=float))[0])

    def eval_array(self, XP, R) -> np.ndarray:
        XP = np.asarray(XP, dtype=float)
        R = np.asarray(R, dtype=float)
        if XP.ndim != 2 or XP.shape[1] != self.n - 1 or R.shape != (XP.shape[0],):
            raise DomainError(f"profile expects XP (N,{self.n - 1}) and R (N,)")
        if R.size and np.min(R) <= 0:
            raise DomainError(f"profile evaluated at r = {np.min(R)} <= 0")
        if self._cache is not None:
            key = (XP.tobytes(), R.tobytes())
            hit = self._cache.get(key)
            if hit is not None:
                return hit.copy()
        vals = np.asarray(self._func(XP, R), dtype=float)
        if self._cache is not None:
            if len(self._cache) > 64:
                self._cache.clear()
            self._cache[key] = vals.copy()
        return vals

    def with_cache(self) -> "SphereProfile":
        out = SphereProfile(self.n, self._func, self.xprime_box, self.r_support)
        out._cache = {}
        return out


@dataclass(frozen=True)
class Grid:
    """Tensor grid: per-axis (lo, hi, count) with count >= 2 and lo < hi."""

    axes: tuple

    def __post_init__(self):
        axes = tuple((float(lo), float(hi), int(cnt)) for lo, hi, cnt in self.axes)
        for lo, hi, cnt in axes:
            if cnt < 2:
                raise ConfigError("grid node counts must be >= 2")
            if not hi > lo:
                raise ConfigError("grid ranges must be nondegenerate")
        object.__setattr__(self, "axes", axes)

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(cnt for _, _, cnt in self.axes)

    def nodes(self, axis: int) -> np.ndarray:
        lo, hi, cnt = self.axes[axis]
        return np.linspace(lo, hi, cnt)

    def points(self) -> np.ndarray:
        grids = np.meshgrid(*[self.nodes(i) for i in range(self.n)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


def make_test_field(kind: str, n: int, center, scale: float,
                    domain: str = "full") -> ScalarField:
    """Analytic phantoms used throughout the test and acceptance suites.

    kind = "gaussian":
        y -> exp(-|y - center|^2 / scale^2)
    kind = "bump":
        y -> exp(-1 / (1 - |y - center|^2 / scale^2)) inside the ball of
        radius scale, 0 outside (the standard compactly supported mollifier)
    kind = "monomial_times_gaussian":
        y -> y_n * exp(-|y|^2 / scale^2)   (center is not used by this kind)
    """
    if not scale > 0:
        raise DomainError("scale must be positive")
    if isinstance(center, Point):
        c = center.as_array()
    else:
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if c.size == 1 and n > 1:
            c = np.full(n, float(c[0]))
    if c.shape != (n,):
        raise ConfigError(f"center must have {n} coordinates, got {c.shape}")
    s = float(scale)

    if kind == "gaussian":
        func = lambda pts: np.exp(-np.sum((pts - c) ** 2, axis=1) / s ** 2)
        box = tuple((ci - 8 * s, ci + 8 * s) for ci in c)
    elif kind == "bump":
        if domain == "half" and not c[-1] - s > 0:
            raise DomainError("bump support must lie strictly inside the half-space")

        def func(pts):
            u = np.sum((pts - c) ** 2, axis=1) / s ** 2
            out = np.zeros(pts.shape[0])
            inside = u < 1.0
            out[inside] = np.exp(-1.0 / (1.0 - u[inside]))
            return out

        box = tuple((ci - s, ci + s) for ci in c)
    elif kind == "monomial_times_gaussian":
        func = lambda pts: pts[:, -1] * np.exp(-np.sum(pts ** 2, axis=1) / s ** 2)
        box = tuple((-8 * s, 8 * s) for _ in range(n))
    else:
        raise ConfigError(f"unknown phantom kind {kind!r}")

    if domain == "half":
        box = box[:-1] + ((max(box[-1][0], 0.0), max(box[-1][1], 0.0)),)
    return ScalarField(n, func, domain=domain, box=box)


def sample_on_grid(field: ScalarField, grid: Grid) -> np.ndarray:
    """Pointwise field values on the grid, shaped like the grid (no smoothing)."""
    if grid.n != field.n:
        raise DomainError(f"grid dimension {grid.n} != field dimension {field.n}")
    pts = grid.points()
    return field.eval_array(pts).reshape(grid.shape)
