"""Plain, weighted, and mixed Lebesgue norms, plus the scaling scans that
probe which exponent triples admit a bounded transform.

Mixed norms are iterated: an inner integral in the last coordinate (or the
radius, for profiles) raised to s, then an outer L^q integral over the
leading coordinates. The weighted variants insert t^(1-p) (half-space
fields) or r^(1-s) (profiles) into the inner integral.

Truncation policy: the outer integral runs over ``outer_box`` (defaulting to
the data's own support box, else the quadrature R_max). Identity tests that
compare two norms of substitution-related fields should pass outer boxes
related by the same substitution; the truncated norms then satisfy the
identity exactly, so the comparison does not depend on how much mass the
truncation discards.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError
from .fields import ScalarField, SphereProfile
from .operators import OperatorId, apply
from .quadrature import QuadratureSpec, eval_chunked, gauss_rule, window_buckets
from .transforms import parabolic_field, sonar_profile, transversal_field

_LP_WEIGHTS = (None, "half_space_weight")
_MIXED_WEIGHTS = (None, "profile_weight")

AdmissibleTriple = namedtuple("AdmissibleTriple", ["q", "s", "valid"])


@dataclass(frozen=True)
class MixedNormTriple:
    """Exponent triple (p, q, s) in dimension n."""

    p: float
    q: float
    s: float
    n: int

    @property
    def admissible(self) -> bool:
        q, s, valid = admissible(self.p, self.n)
        return valid and math.isclose(q, self.q) and math.isclose(s, self.s)

    @classmethod
    def from_p(cls, p: float, n: int) -> "MixedNormTriple":
        q, s, _ = admissible(p, n)
        return cls(p=p, q=q, s=s, n=n)


def admissible(p: float, n: int):
    """The (q, s) forced by p via duality and the scaling relation.

    q is the conjugate exponent of p and 1/s = 1 - n/q; the triple is valid
    exactly when 1 <= p < n/(n-1) (equivalently q > n), which keeps s finite
    and positive.
    """
    if n < 2:
        raise DomainError("admissible requires n >= 2")
    if p < 1:
        return AdmissibleTriple(float("nan"), float("nan"), False)
    q = math.inf if p == 1 else p / (p - 1)
    inv_s = 1.0 if math.isinf(q) else 1.0 - n / q
    if inv_s > 0:
        s = 1.0 / inv_s
    elif inv_s == 0:
        s = math.inf
    else:
        s = 1.0 / inv_s
    valid = 1 <= p < n / (n - 1)
    return AdmissibleTriple(q, s, valid)


def _outer_tensor(outer_box, m):
    axes = []
    for lo, hi in outer_box:
        gx, gw = gauss_rule(m)
        half = 0.5 * (hi - lo)
        axes.append((lo + half * (gx + 1.0), half * gw))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    XP = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    W = np.ones(XP.shape[0])
    for g in wgrids:
        W *= g.ravel()
    return XP, W


def _normalize_outer_box(outer_box, k, default):
    if outer_box is None:
        return default
    box = np.asarray(outer_box, dtype=float)
    if box.ndim == 1:
        box = box[None, :]
    if box.shape == (1, 2) and k > 1:
        box = np.repeat(box, k, axis=0)
    if box.shape != (k, 2):
        raise DomainError(f"outer_box must give (lo, hi) for {k} axes")
    return tuple((float(a), float(b)) for a, b in box)


def _inner_sums(eval_inner, lo, hi, s_exp, weight_exp, spec, min_nodes):
    """Per-outer-node inner integrals of |data|^s * t^weight_exp."""
    out = np.zeros(lo.shape[0])
    width_ref = float(np.max(hi - lo, initial=0.0))
    if width_ref <= 0:
        return out
    for idx, nodes, w in window_buckets(lo, hi, spec.m, width_ref,
                                        min_nodes=min_nodes):
        vals = eval_inner(idx, nodes)
        integrand = np.abs(vals) ** s_exp
        if weight_exp != 0.0:
            integrand = integrand * nodes ** weight_exp
        out[idx] = (integrand * w).sum(axis=1)
    return out


def _iterated_power(data, s_exp, weight_exp, spec, outer_box, min_nodes=64):
    """Outer nodes XP, outer weights W, and inner integrals at each XP."""
    n = data.n
    k = n - 1
    R = spec.R_max
    if isinstance(data, SphereProfile):
        default = data.xprime_box if data.xprime_box is not None \
            else tuple((-R, R) for _ in range(k))
        obox = _normalize_outer_box(outer_box, k, default)
        XP, W = _outer_tensor(obox, spec.m)
        if data.r_support is not None:
            lo, hi = data.r_support(XP)
        else:
            lo = np.zeros(XP.shape[0])
            hi = np.full(XP.shape[0], R)
        lo = np.maximum(lo, 1e-12)

        def eval_inner(idx, nodes):
            b, m = nodes.shape
            XPrep = np.repeat(XP[idx], m, axis=0)
            return data.eval_array(XPrep, nodes.ravel()).reshape(b, m)

    else:
        default = tuple(data.box[:-1]) if data.box is not None \
            else tuple((-R, R) for _ in range(k))
        obox = _normalize_outer_box(outer_box, k, default)
        XP, W = _outer_tensor(obox, spec.m)
        if data.section_support is not None:
            lo, hi = data.section_support(XP)
        elif data.box is not None:
            lo = np.full(XP.shape[0], data.box[-1][0])
            hi = np.full(XP.shape[0], data.box[-1][1])
        else:
            lo = np.full(XP.shape[0], -R)
            hi = np.full(XP.shape[0], R)
        if data.domain == "half":
            lo = np.maximum(lo, 1e-12)

        def eval_inner(idx, nodes):
            b, m = nodes.shape
            pts = np.concatenate([np.repeat(XP[idx], m, axis=0),
                                  nodes.ravel()[:, None]], axis=1)
            return eval_chunked(data.eval_array, pts).reshape(b, m)

    inner = _inner_sums(eval_inner, lo, hi, s_exp, weight_exp, spec, min_nodes)
    if weight_exp < 0:
        # singular-weight guard: double the nodes where the window nears 0
        near = lo < 0.05 * np.maximum(hi - lo, 1e-300)
        if near.any():
            refined = _inner_sums(eval_inner, lo[near], hi[near], s_exp,
                                  weight_exp, spec, 2 * min_nodes)
            base = inner[near]
            scale = float(np.max(np.abs(refined), initial=0.0))
            if scale > 0 and np.max(np.abs(refined - base)) > 1e-4 * scale:
                raise QuadratureError(
                    "inner integral near the singular weight did not converge "
                    "under node doubling")
            inner[near] = refined
    return XP, W, inner


def lp_norm(field: ScalarField, p: float, weight=None, spec=None, *,
            outer_box=None) -> float:
    """||field||_p, or the weighted version with t^(1-p) on the half-space."""
    if p < 1:
        raise DomainError("lp_norm requires p >= 1")
    if weight not in _LP_WEIGHTS:
        raise DomainError(f"unknown weight {weight!r} for lp_norm")
    if weight == "half_space_weight" and field.domain != "half":
        raise DomainError("half_space_weight requires a half-space field")
    if not isinstance(field, ScalarField):
        raise DomainError("lp_norm consumes a ScalarField")
    spec = spec if spec is not None else QuadratureSpec.for_dimension(field.n)
    weight_exp = (1.0 - p) if weight == "half_space_weight" else 0.0
    _, W, inner = _iterated_power(field, p, weight_exp, spec, outer_box)
    return float(np.dot(W, inner) ** (1.0 / p))


def mixed_norm(data, q: float, s: float, weight=None, spec=None, *,
               outer_box=None) -> float:
    """Iterated norm: inner L^s in the last coordinate (or radius), outer L^q.

    weight = "profile_weight" inserts r^(1-s) into the inner integral and
    requires a SphereProfile. q = inf is read as the sup over the outer
    nodes of the inner norm.
    """
    if (not math.isinf(q) and q < 1) or s < 1:
        raise DomainError("mixed_norm requires q, s >= 1")
    if weight not in _MIXED_WEIGHTS:
        raise DomainError(f"unknown weight {weight!r} for mixed_norm")
    if weight == "profile_weight" and not isinstance(data, SphereProfile):
        raise DomainError("profile_weight requires a SphereProfile")
    if not isinstance(data, (ScalarField, SphereProfile)):
        raise DomainError("mixed_norm consumes a ScalarField or SphereProfile")
    n = data.n
    spec = spec if spec is not None else QuadratureSpec.for_dimension(n)
    weight_exp = (1.0 - s) if weight == "profile_weight" else 0.0
    _, W, inner = _iterated_power(data, s, weight_exp, spec, outer_box)
    if math.isinf(q):
        return float(np.max(inner, initial=0.0) ** (1.0 / s))
    return float(np.dot(W, inner ** (q / s)) ** (1.0 / q))


@dataclass(frozen=True)
class ScanEntry:
    """One row of a scaling scan: dilation, the two norms, and their ratio."""

    lam: tuple
    output_norm: float
    input_norm: float
    ratio: float


_SCAN_TRANSFORMS = ("transversal", "parabolic", "sonar")


def scaling_scan(transform: str, p: float, q: float, s: float, n: int,
                 lambdas, base: ScalarField, spec=None, *,
                 outer_radius: float = 16.0):
    """Norm ratios output/input across dilated copies of ``base``.

    For each lam = (lam1, lam2) the input is dilated by axis_dilate(lam), the
    transform is applied, and the ratio of the output (q, s) mixed norm to
    the input L^p norm is recorded. The sonar entry uses the weighted norms
    natural to it (r^(1-s) inner weight against the t^(1-p) half-space
    weight); the other transforms use plain norms.

    Outer truncation boxes follow the dilation (slope boxes scale like
    lam1/lam2 for the transversal transform, center boxes like 1/lam1
    otherwise), so for exact power-law families the truncated ratios follow
    the exact power law.
    """
    if transform not in _SCAN_TRANSFORMS:
        raise DomainError(f"unknown transform {transform!r} for scaling_scan")
    if base.box is None:
        raise DomainError("scaling_scan needs a base field with a support box")
    spec = spec if spec is not None else QuadratureSpec.for_dimension(n)
    entries = []
    for lam in lambdas:
        lam = (float(lam[0]), float(lam[1]))
        scaled = apply(OperatorId("axis_dilate", lam), base)
        if transform == "transversal":
            out = transversal_field(scaled, spec)
            S = outer_radius * lam[0] / lam[1]
            out_norm = mixed_norm(out, q, s, None, spec, outer_box=((-S, S),) * (n - 1))
            in_norm = lp_norm(scaled, p, None, spec)
        elif transform == "parabolic":
            out = parabolic_field(scaled, spec)
            S = outer_radius / lam[0]
            out_norm = mixed_norm(out, q, s, None, spec, outer_box=((-S, S),) * (n - 1))
            in_norm = lp_norm(scaled, p, None, spec)
        else:
            out = sonar_profile(scaled, spec)
            S = outer_radius / lam[0]
            out_norm = mixed_norm(out, q, s, "profile_weight", spec,
                                  outer_box=((-S, S),) * (n - 1))
            in_norm = lp_norm(scaled, p, "half_space_weight", spec)
        entries.append(ScanEntry(lam=lam, output_norm=out_norm,
                                 input_norm=in_norm,
                                 ratio=out_norm / in_norm))
    return entries
