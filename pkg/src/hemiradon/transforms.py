"""Forward transforms: hemispherical means, the parabolic and transversal
Radon transforms, the classical Radon transform, and the slope-intercept
change of variables connecting the classical and transversal forms.

Conventions
-----------
sonar:        (x', r)   -> integral of phi over the upper hemisphere of
                           radius r centered at (x', 0), surface measure.
parabolic:    (x', x_n) -> integral over y' of f(x' - y', x_n - |y'|^2).
transversal:  (x', x_n) -> integral over y' of psi(y', x' . y' + x_n),
                           i.e. planes parameterized by slope and intercept.
classical:    (theta,t) -> integral of f over the hyperplane x . theta = t.

Every transform places quadrature nodes through per-point support windows
derived from the input field's support box; the node count scales with the
window width, so the cost tracks the geometry instead of the bounding box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fields import Point, ScalarField, SphereProfile, _as_points_array
from .quadrature import (QuadratureSpec, eval_chunked, gauss_rule, mapped_rule,
                         tier_counts, window_buckets)

_PARABOLIC_VARIANTS = ("full", "restricted", "surface_measure")


def _default_spec(n: int, spec):
    return spec if spec is not None else QuadratureSpec.for_dimension(n)


def _box_or_default(field, spec):
    if field.box is not None:
        return field.box
    R = spec.R_max
    return tuple((-R, R) for _ in range(field.n))


def _center_halfwidth(box):
    c = np.array([(a + b) / 2 for a, b in box])
    h = np.array([(b - a) / 2 for a, b in box])
    return c, h


# ---------------------------------------------------------------------------
# sonar (hemispherical means)
# ---------------------------------------------------------------------------

def sonar_transform(phi: ScalarField, xprime, r: float, spec=None) -> float:
    """Surface integral of phi over the upper hemisphere S+(x', r).

    For n = 2 this is the arc integral
        int_0^pi phi(x' + r cos t, r sin t) r dt,
    and for n >= 3 the spherical chart in the polar cosine c = y_n / r with
    surface element r^{n-1} (1 - c^2)^{(n-3)/2} dc d(omega).
    """
    if phi.domain != "half":
        raise DomainError("sonar consumes a half-space field")
    spec = _default_spec(phi.n, spec)
    xp = np.atleast_1d(np.asarray(xprime, dtype=float))[None, :]
    if xp.shape[1] != phi.n - 1:
        raise DomainError(f"xprime must have {phi.n - 1} coordinates")
    rr = np.asarray([r], dtype=float)
    if rr[0] <= 0:
        raise DomainError("hemisphere radius must be positive")
    return float(_sonar_batch(phi, xp, rr, spec)[0])


def sonar_profile(phi: ScalarField, spec=None) -> SphereProfile:
    """The sonar transform as a lazily evaluated profile in (x', r)."""
    if phi.domain != "half":
        raise DomainError("sonar consumes a half-space field")
    spec = _default_spec(phi.n, spec)
    r_support = None
    if phi.box is not None:
        box = phi.box

        def r_support(XP):
            XP = np.asarray(XP, dtype=float)
            lo2 = np.zeros(XP.shape[0])
            hi2 = np.zeros(XP.shape[0])
            for i, (a, b) in enumerate(box[:-1]):
                gap = np.maximum(np.maximum(a - XP[:, i], XP[:, i] - b), 0.0)
                far = np.maximum(np.abs(XP[:, i] - a), np.abs(XP[:, i] - b))
                lo2 += gap ** 2
                hi2 += far ** 2
            a, b = box[-1]
            lo2 += max(a, 0.0) ** 2
            hi2 += max(abs(a), abs(b)) ** 2
            return np.sqrt(lo2), np.sqrt(hi2)

    return SphereProfile(phi.n, lambda XP, R: _sonar_batch(phi, XP, R, spec),
                         xprime_box=None, r_support=r_support)


def _sonar_batch(phi, XP, R, spec):
    if np.min(R) <= 0:
        raise DomainError("hemisphere radius must be positive")
    if phi.n == 2:
        return _sonar_batch_2d(phi, XP, R, spec)
    return _sonar_batch_nd(phi, XP, R, spec)


def _sonar_batch_2d(phi, XP, R, spec):
    x = XP[:, 0]
    M = x.shape[0]
    if phi.box is not None:
        (b1lo, b1hi), (b2lo, b2hi) = phi.box
        # cos t = (y1 - x)/r must reach the first-axis support
        clo = np.clip((b1lo - x) / R, -1.0, 1.0)
        chi = np.clip((b1hi - x) / R, -1.0, 1.0)
        tlo = np.arccos(chi)
        thi = np.arccos(clo)
        # sin t = y2/r must reach above the lower support edge
        slo = max(b2lo, 0.0) / R
        ok = slo < 1.0
        a = np.arcsin(np.clip(slo, 0.0, 1.0))
        tlo = np.maximum(tlo, a)
        thi = np.where(ok, np.minimum(thi, np.pi - a), tlo)
    else:
        tlo = np.zeros(M)
        thi = np.full(M, np.pi)
    out = np.zeros(M)
    for idx, nodes, w in window_buckets(tlo, thi, spec.m, np.pi):
        b, m = nodes.shape
        pts = np.empty((b * m, 2))
        pts[:, 0] = (x[idx, None] + R[idx, None] * np.cos(nodes)).ravel()
        pts[:, 1] = (R[idx, None] * np.sin(nodes)).ravel()
        vals = eval_chunked(phi.eval_array, pts).reshape(b, m)
        out[idx] = (vals * w).sum(axis=1) * R[idx]
    return out


def _sonar_batch_nd(phi, XP, R, spec):
    n = phi.n
    M = XP.shape[0]
    clo = np.zeros(M)
    chi = np.ones(M)
    alpha = np.zeros(M)
    halfang = np.full(M, np.pi)
    if phi.box is not None:
        b2lo, b2hi = phi.box[-1]
        clo = np.clip(max(b2lo, 0.0) / R, 0.0, 1.0)
        chi = np.minimum(chi, np.clip(b2hi / R, 0.0, 1.0))
        c, h = _center_halfwidth(phi.box[:-1])
        circ = float(np.linalg.norm(h))
        d = c[None, :] - XP
        dist = np.linalg.norm(d, axis=1)
        # lateral reach r sin(theta) must fall inside [dist-circ, dist+circ]
        near = np.clip((dist - circ) / R, 0.0, None)
        farr = np.clip((dist + circ) / R, 0.0, 1.0)
        feas = near < 1.0
        chi = np.where(feas, np.minimum(chi, np.sqrt(np.clip(1 - near ** 2, 0, 1))), clo)
        clo = np.maximum(clo, np.sqrt(np.clip(1 - farr ** 2, 0, 1)))
        if n == 3:
            alpha = np.arctan2(d[:, 1], d[:, 0])
            with np.errstate(invalid="ignore"):
                halfang = np.where(dist <= circ, np.pi,
                                   np.arcsin(np.clip(circ / np.maximum(dist, 1e-300), 0, 1)))
    out = np.zeros(M)
    if n == 3:
        valid, cnt_c = tier_counts(clo, chi, spec.m, 1.0)
        _, cnt_a = tier_counts(alpha - halfang, alpha + halfang, 2 * spec.m,
                               2 * np.pi, min_nodes=16, max_nodes=2 * spec.m)
        key = cnt_c * 100000 + cnt_a
        for k in np.unique(key[valid]):
            idx = np.nonzero(valid & (key == k))[0]
            mc, ma = int(cnt_c[idx[0]]), int(cnt_a[idx[0]])
            cn, cw = mapped_rule(clo[idx], chi[idx], mc)          # (b, mc)
            full = halfang[idx[0]] >= np.pi
            if full:
                ang = (np.arange(ma) + 0.5) * (2 * np.pi / ma)
                an = np.broadcast_to(ang, (len(idx), ma))
                aw = np.full((len(idx), ma), 2 * np.pi / ma)
            else:
                an, aw = mapped_rule(alpha[idx] - halfang[idx],
                                     alpha[idx] + halfang[idx], ma)
            sin_pol = np.sqrt(np.clip(1 - cn ** 2, 0, 1))          # (b, mc)
            rad = R[idx][:, None, None] * sin_pol[:, :, None]      # (b, mc, 1)
            pts = np.empty((len(idx), mc, ma, 3))
            pts[..., 0] = XP[idx, 0][:, None, None] + rad * np.cos(an)[:, None, :]
            pts[..., 1] = XP[idx, 1][:, None, None] + rad * np.sin(an)[:, None, :]
            pts[..., 2] = (R[idx][:, None] * cn)[:, :, None]
            vals = eval_chunked(phi.eval_array, pts.reshape(-1, 3)).reshape(len(idx), mc, ma)
            w = cw[:, :, None] * aw[:, None, :]
            out[idx] = (vals * w).sum(axis=(1, 2)) * R[idx] ** 2
        return out
    # n >= 4: full product chart, no angular windowing
    from .quadrature import sphere_nodes
    mc = spec.m
    omega, womega = sphere_nodes(n - 2, max(16, spec.m // 2))
    gx, gw = gauss_rule(mc)
    for i in range(M):
        if chi[i] <= clo[i]:
            continue
        half = 0.5 * (chi[i] - clo[i])
        cn = clo[i] + half * (gx + 1.0)
        cw = half * gw
        sin_pol = np.sqrt(np.clip(1 - cn ** 2, 0, 1))
        yp = XP[i][None, None, :] + R[i] * sin_pol[:, None, None] * omega[None, :, :]
        pts = np.concatenate([yp, np.broadcast_to((R[i] * cn)[:, None, None],
                                                  yp.shape[:2] + (1,))], axis=2)
        vals = eval_chunked(phi.eval_array, pts.reshape(-1, n)).reshape(mc, -1)
        jac = (1 - cn ** 2) ** ((n - 3) / 2)
        out[i] = R[i] ** (n - 1) * np.einsum("c,c,co,o->", cw, jac, vals, womega)
    return out


# ---------------------------------------------------------------------------
# parabolic
# ---------------------------------------------------------------------------

def parabolic_transform(f: ScalarField, x, spec=None, variant: str = "full") -> float:
    """Integral of f(x' - y', x_n - |y'|^2) over y' in R^{n-1}.

    variant "restricted" integrates over |y'| < sqrt(x_n) only (defined for
    x_n > 0); "surface_measure" multiplies the integrand by
    sqrt(1 + 4 |y'|^2), turning the integral into the surface integral over
    the shifted paraboloid.
    """
    if f.domain != "full":
        raise DomainError("parabolic transform consumes a full-space field")
    spec = _default_spec(f.n, spec)
    X = _as_points_array(x if not isinstance(x, Point) else x.as_array(), f.n)
    return float(_parabolic_batch(f, X, spec, variant)[0])


def parabolic_field(f: ScalarField, spec=None, variant: str = "full") -> ScalarField:
    """The parabolic transform as a lazily evaluated field on R^n."""
    if variant not in _PARABOLIC_VARIANTS:
        raise DomainError(f"unknown parabolic variant {variant!r}")
    if f.domain != "full":
        raise DomainError("parabolic transform consumes a full-space field")
    spec = _default_spec(f.n, spec)
    section = None
    if f.box is not None:
        box = f.box

        def section(XP):
            XP = np.asarray(XP, dtype=float)
            lo2 = np.zeros(XP.shape[0])
            hi2 = np.zeros(XP.shape[0])
            for i, (a, b) in enumerate(box[:-1]):
                ylo = XP[:, i] - b
                yhi = XP[:, i] - a
                inside = (ylo <= 0) & (yhi >= 0)
                lo2 += np.where(inside, 0.0, np.minimum(ylo ** 2, yhi ** 2))
                hi2 += np.maximum(ylo ** 2, yhi ** 2)
            a, b = box[-1]
            return a + lo2, b + hi2

    return ScalarField(f.n, lambda pts: _parabolic_batch(f, pts, spec, variant),
                       domain="full", box=None, section_support=section)


def _parabolic_batch(f, X, spec, variant):
    if variant not in _PARABOLIC_VARIANTS:
        raise DomainError(f"unknown parabolic variant {variant!r}")
    if variant == "restricted" and np.min(X[:, -1]) <= 0:
        raise DomainError("restricted parabolic transform requires x_n > 0")
    box = _box_or_default(f, spec)
    xn = X[:, -1]
    b2lo, b2hi = box[-1]
    rhi2 = xn - b2lo
    if variant == "restricted":
        rhi2 = np.minimum(rhi2, xn)
    rlo2 = np.maximum(xn - b2hi, 0.0)
    rhi = np.sqrt(np.maximum(rhi2, 0.0))
    rlo = np.sqrt(rlo2)
    if f.n == 2:
        return _parabolic_batch_2d(f, X, spec, variant, box, rlo, rhi)
    if f.n == 3:
        return _parabolic_batch_3d(f, X, spec, variant, box, rlo, rhi)
    raise DomainError("parabolic transform implemented for n in {2, 3}")


def _parabolic_batch_2d(f, X, spec, variant, box, rlo, rhi):
    x = X[:, 0]
    xn = X[:, 1]
    (b1lo, b1hi), _ = box
    wlo = x - b1hi
    whi = x - b1lo
    width_ref = b1hi - b1lo
    out = np.zeros(X.shape[0])
    # the support is an annulus in y: handle the two radial sides separately
    sides = ((np.maximum(rlo, wlo), np.minimum(rhi, whi)),
             (np.maximum(-rhi, wlo), np.minimum(-rlo, whi)))
    for lo, hi in sides:
        for idx, nodes, w in window_buckets(lo, hi, spec.m, width_ref):
            b, m = nodes.shape
            pts = np.empty((b * m, 2))
            pts[:, 0] = (x[idx, None] - nodes).ravel()
            pts[:, 1] = (xn[idx, None] - nodes ** 2).ravel()
            vals = eval_chunked(f.eval_array, pts).reshape(b, m)
            if variant == "surface_measure":
                vals = vals * np.sqrt(1 + 4 * nodes ** 2)
            out[idx] += (vals * w).sum(axis=1)
    return out


def _parabolic_batch_3d(f, X, spec, variant, box, rlo, rhi):
    xp = X[:, :2]
    xn = X[:, 2]
    c, h = _center_halfwidth(box[:-1])
    circ = float(np.linalg.norm(h))
    d = xp - c[None, :]                       # y' window is centered at x' - c
    dist = np.linalg.norm(d, axis=1)
    rlo = np.maximum(rlo, np.maximum(dist - circ, 0.0))
    rhi = np.minimum(rhi, dist + circ)
    with np.errstate(invalid="ignore"):
        halfang = np.where(dist <= circ, np.pi,
                           np.arcsin(np.clip(circ / np.maximum(dist, 1e-300), 0, 1)))
    alpha = np.arctan2(d[:, 1], d[:, 0])
    valid, cnt_r = tier_counts(rlo, rhi, spec.m, 2 * circ)
    _, cnt_a = tier_counts(alpha - halfang, alpha + halfang, 2 * spec.m,
                           2 * np.pi, min_nodes=16, max_nodes=2 * spec.m)
    out = np.zeros(X.shape[0])
    key = cnt_r * 100000 + cnt_a
    for k in np.unique(key[valid]):
        idx = np.nonzero(valid & (key == k))[0]
        mr, ma = int(cnt_r[idx[0]]), int(cnt_a[idx[0]])
        rn, rw = mapped_rule(rlo[idx], rhi[idx], mr)
        if halfang[idx[0]] >= np.pi:
            ang = (np.arange(ma) + 0.5) * (2 * np.pi / ma)
            an = np.broadcast_to(ang, (len(idx), ma))
            aw = np.full((len(idx), ma), 2 * np.pi / ma)
        else:
            an, aw = mapped_rule(alpha[idx] - halfang[idx], alpha[idx] + halfang[idx], ma)
        pts = np.empty((len(idx), mr, ma, 3))
        pts[..., 0] = xp[idx, 0][:, None, None] - rn[:, :, None] * np.cos(an)[:, None, :]
        pts[..., 1] = xp[idx, 1][:, None, None] - rn[:, :, None] * np.sin(an)[:, None, :]
        pts[..., 2] = xn[idx][:, None, None] - (rn ** 2)[:, :, None]
        vals = eval_chunked(f.eval_array, pts.reshape(-1, 3)).reshape(len(idx), mr, ma)
        if variant == "surface_measure":
            vals = vals * np.sqrt(1 + 4 * rn ** 2)[:, :, None]
        w = (rn * rw)[:, :, None] * aw[:, None, :]
        out[idx] += (vals * w).sum(axis=(1, 2))
    return out


# ---------------------------------------------------------------------------
# transversal
# ---------------------------------------------------------------------------

def transversal_transform(psi: ScalarField, x, spec=None) -> float:
    """Integral of psi(y', x' . y' + x_n) over y' in R^{n-1}."""
    if psi.domain != "full":
        raise DomainError("transversal transform consumes a full-space field")
    spec = _default_spec(psi.n, spec)
    X = _as_points_array(x if not isinstance(x, Point) else x.as_array(), psi.n)
    return float(_transversal_batch(psi, X, spec)[0])


def transversal_field(psi: ScalarField, spec=None) -> ScalarField:
    """The transversal transform as a lazily evaluated field in (slope, intercept)."""
    if psi.domain != "full":
        raise DomainError("transversal transform consumes a full-space field")
    spec = _default_spec(psi.n, spec)
    section = None
    if psi.box is not None:
        box = psi.box
        c, h = _center_halfwidth(box[:-1])

        def section(XP):
            XP = np.asarray(XP, dtype=float)
            mid = XP @ c
            spread = np.abs(XP) @ h
            return box[-1][0] - mid - spread, box[-1][1] - mid + spread

    return ScalarField(psi.n, lambda pts: _transversal_batch(psi, pts, spec),
                       domain="full", box=None, section_support=section)


def _transversal_batch(psi, X, spec):
    if psi.n == 2:
        return _transversal_batch_2d(psi, X, spec)
    return _transversal_batch_nd(psi, X, spec)


def _transversal_batch_2d(psi, X, spec):
    sig = X[:, 0]
    tau = X[:, 1]
    box = _box_or_default(psi, spec)
    (b1lo, b1hi), (b2lo, b2hi) = box
    lo = np.full(X.shape[0], b1lo)
    hi = np.full(X.shape[0], b1hi)
    live = np.abs(sig) > 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        e1 = (b2lo - tau) / sig
        e2 = (b2hi - tau) / sig
    slab_lo = np.minimum(e1, e2)
    slab_hi = np.maximum(e1, e2)
    lo = np.where(live, np.maximum(lo, slab_lo), lo)
    hi = np.where(live, np.minimum(hi, slab_hi), hi)
    # slope 0: the second slot is constant tau; support check only
    flat_dead = (~live) & ((tau < b2lo) | (tau > b2hi))
    hi = np.where(flat_dead, lo, hi)
    out = np.zeros(X.shape[0])
    for idx, nodes, w in window_buckets(lo, hi, spec.m, b1hi - b1lo):
        b, m = nodes.shape
        pts = np.empty((b * m, 2))
        pts[:, 0] = nodes.ravel()
        pts[:, 1] = (sig[idx, None] * nodes + tau[idx, None]).ravel()
        vals = eval_chunked(psi.eval_array, pts).reshape(b, m)
        out[idx] = (vals * w).sum(axis=1)
    return out


def _transversal_batch_nd(psi, X, spec):
    """Rotated-frame evaluation: the first frame axis is the slope direction,
    so the hyperplane constraint becomes a 1-D slab in that coordinate."""
    n = psi.n
    k = n - 1
    M = X.shape[0]
    sig = X[:, :k]
    tau = X[:, -1]
    box = _box_or_default(psi, spec)
    c, h = _center_halfwidth(box[:-1])
    b2lo, b2hi = box[-1]
    smag = np.linalg.norm(sig, axis=1)
    live = smag > 1e-300
    shat = np.where(live[:, None], sig / np.maximum(smag, 1e-300)[:, None], 0.0)
    # Householder frames mapping e_1 to the slope direction, batched
    v = shat - np.eye(k)[0][None, :]
    vnorm2 = np.sum(v ** 2, axis=1)
    basis = np.broadcast_to(np.eye(k)[None, :, :], (M, k, k)).copy()
    nz = vnorm2 > 1e-28
    basis[nz] -= 2 * v[nz, :, None] * v[nz, None, :] / vnorm2[nz, None, None]
    basis[~live] = np.eye(k)[None, :, :]
    # frame-axis support windows of the box via its support function
    mid = basis @ c                                    # (M, k) of axis . center
    spread = np.abs(basis) @ h
    lo = mid - spread
    hi = mid + spread
    with np.errstate(divide="ignore", invalid="ignore"):
        e1 = (b2lo - tau) / smag
        e2 = (b2hi - tau) / smag
    lo[live, 0] = np.maximum(lo[live, 0], np.minimum(e1, e2)[live])
    hi[live, 0] = np.minimum(hi[live, 0], np.maximum(e1, e2)[live])
    flat_dead = (~live) & ((tau < b2lo) | (tau > b2hi))
    hi[flat_dead, 0] = lo[flat_dead, 0]

    width_ref = 2 * float(np.max(h)) if np.max(h) > 0 else 1.0
    valid = np.ones(M, dtype=bool)
    cnts = np.empty((M, k), dtype=int)
    for j in range(k):
        vj, cj = tier_counts(lo[:, j], hi[:, j], spec.m, width_ref)
        valid &= vj
        cnts[:, j] = cj
    out = np.zeros(M)
    if not valid.any():
        return out
    keys, inverse = np.unique(cnts[valid], axis=0, return_inverse=True)
    vidx = np.nonzero(valid)[0]
    for g in range(keys.shape[0]):
        gidx = vidx[inverse == g]
        ms = [int(v) for v in keys[g]]
        nodes_per_pt = int(np.prod(ms))
        # bound the tensor-product temporaries, not just the field eval
        sub = max(1, 2_000_000 // nodes_per_pt)
        for s0 in range(0, len(gidx), sub):
            idx = gidx[s0:s0 + sub]
            axis_nodes, axis_w = [], []
            for j, m in enumerate(ms):
                nj, wj = mapped_rule(lo[idx, j], hi[idx, j], m)
                axis_nodes.append(nj)
                axis_w.append(wj)
            # tensor product in the rotated frame, then rotate back
            shape = (len(idx),) + tuple(ms)
            coords = np.empty(shape + (k,))
            wts = np.ones(shape)
            for j in range(k):
                sl = (slice(None),) + tuple(
                    None if a != j else slice(None) for a in range(k))
                coords[..., j] = axis_nodes[j][sl]
                wts = wts * axis_w[j][sl]
            flat = coords.reshape(len(idx), -1, k)
            yp = np.einsum("bik,bkj->bij", flat, basis[idx])
            second = smag[idx][:, None] * flat[..., 0] + tau[idx][:, None]
            pts = np.concatenate([yp, second[..., None]], axis=2).reshape(-1, n)
            vals = eval_chunked(psi.eval_array, pts).reshape(len(idx), -1)
            out[idx] = (vals * wts.reshape(len(idx), -1)).sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# classical Radon transform and the slope-intercept relation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadonPlane:
    """Hyperplane {y : y . theta = t} with unit normal theta."""

    theta: tuple
    t: float

    def __post_init__(self):
        th = tuple(float(v) for v in np.atleast_1d(self.theta))
        norm = float(np.linalg.norm(th))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"theta must be a unit vector, |theta| = {norm}")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return len(self.theta)


def _householder_tangent_basis(theta: np.ndarray) -> np.ndarray:
    """Columns: an orthonormal basis of the hyperplane normal to theta.

    Deterministic completion via the reflection that maps e_n to theta.
    """
    n = theta.shape[0]
    v = theta - np.eye(n)[-1]
    vn2 = float(v @ v)
    H = np.eye(n)
    if vn2 > 1e-28:
        H -= 2 * np.outer(v, v) / vn2
    return H[:, :n - 1]


def classical_radon(f: ScalarField, plane: RadonPlane, spec=None) -> float:
    """Integral of f over the hyperplane y . theta = t."""
    if plane.n != f.n:
        raise DomainError("plane dimension does not match the field")
    if f.domain != "full":
        raise DomainError("classical Radon transform consumes a full-space field")
    spec = _default_spec(f.n, spec)
    theta = np.asarray(plane.theta)
    B = _householder_tangent_basis(theta)             # (n, n-1)
    box = _box_or_default(f, spec)
    c, h = _center_halfwidth(box)
    offset = c - plane.t * theta
    mid = B.T @ offset
    spread = np.abs(B.T) @ h
    width_ref = 2 * float(np.max(h))
    axes = []
    for j in range(f.n - 1):
        lo, hi = mid[j] - spread[j], mid[j] + spread[j]
        if hi <= lo:
            return 0.0
        m = int(np.clip(np.ceil(spec.m * (hi - lo) / width_ref), 24, spec.m))
        gx, gw = gauss_rule(m)
        half = 0.5 * (hi - lo)
        axes.append((lo + half * (gx + 1.0), half * gw))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    W = np.ones(U.shape[0])
    for g in wgrids:
        W *= g.ravel()
    pts = plane.t * theta[None, :] + U @ B.T
    vals = eval_chunked(f.eval_array, pts)
    return float(np.dot(vals, W))


def slope_intercept_relation(f: ScalarField, plane: RadonPlane, spec=None):
    """Both sides of the slope-intercept identity for planes meeting the last axis.

    Returns (lhs, rhs) with lhs the classical transform at (theta, t) and
    rhs = |theta_n|^{-1} * (transversal f)(-theta'/theta_n, t/theta_n).
    Requires theta_n != 0.
    """
    theta = np.asarray(plane.theta)
    tn = theta[-1]
    if abs(tn) < 1e-12:
        raise DomainError("slope-intercept relation requires theta_n != 0")
    lhs = classical_radon(f, plane, spec)
    x = Point(tuple(-theta[:-1] / tn), plane.t / tn)
    rhs = transversal_transform(f, x, spec) / abs(tn)
    return lhs, rhs
