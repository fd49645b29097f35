"""Charts, tensor fields and connections evaluated through jets.

A field is a callable taking a jet ``x`` of shape ``(..., n)`` (coordinates
last) and returning a jet of shape ``(..., *component_shape)``.  Since jets
nest, any field can be differentiated again, lifted, or pushed through a
coordinate change without losing exactness.

Index conventions, upper indices first in every layout:

* connection ``gamma[k, i, j]`` is ``Γ^k_ij`` with ``∇_{∂i} ∂j = Γ^k_ij ∂k``;
* torsion ``[k, i, j]``; curvature ``[l, k, i, j]`` is ``R^l_kij`` with
  ``R(∂i, ∂j) ∂k = R^l_kij ∂l``;
* ``nabla_g[i, j, k]`` is ``(∇_i g)_jk``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from .expr import SmoothMap
from .jet import Jet, as_point_jet, einsum, taylor_partials, value_and_jacobian
from .series import DomainError


class DegenerateError(ValueError):
    """A matrix that must be invertible is (numerically) singular."""

    def __init__(self, message, point=None):
        super().__init__(message if point is None else f"{message} at {np.asarray(point).tolist()}")
        self.point = point


# ---------------------------------------------------------------------------
# charts


class Chart:
    """Coordinate chart: names, an open domain and a sampling box.

    ``domain`` is a sequence of :class:`SmoothMap` (or expression strings in
    the coordinate names) that must be strictly positive inside the chart.
    ``box`` gives per-coordinate sampling bounds for seeded point sets.
    """

    def __init__(self, names, domain=(), box=None):
        names = tuple(names)
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be distinct: {names}")
        self.names = names
        self.domain = tuple(
            d if isinstance(d, SmoothMap) else SmoothMap.parse(str(d), names) for d in domain
        )
        if box is None:
            box = [(-1.0, 1.0)] * len(names)
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        if len(box) != len(names):
            raise ValueError("sampling box must have one interval per coordinate")
        self.box = box

    @property
    def dim(self) -> int:
        return len(self.names)

    def __repr__(self):
        return f"Chart({self.names})"

    def tangent(self, r: int) -> "TangentChart":
        """The (cached) chart of ``T^r`` over this chart."""
        cache = self.__dict__.setdefault("_tangent", {})
        if r not in cache:
            cache[r] = TangentChart(self, r)
        return cache[r]

    def contains(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        ok = np.all(np.isfinite(p), axis=-1)
        for pred in self.domain:
            ok &= np.asarray(pred(*(p[..., i] for i in range(self.dim)))) > 0
        return ok

    def check(self, points):
        p = np.asarray(points, dtype=float)
        if p.shape[-1] != self.dim:
            raise ValueError(f"points must have {self.dim} coordinates, got {p.shape[-1]}")
        ok = self.contains(p)
        if not np.all(ok):
            bad = p[~ok] if p.ndim > 1 else p
            raise DomainError(f"point outside the chart domain: {bad.reshape(-1, self.dim)[0].tolist()}", bad)
        return p

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        """``count`` points of a scrambled Halton sequence in the box, inside the domain."""
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        engine = qmc.Halton(d=self.dim, scramble=True, seed=seed)
        out = np.empty((0, self.dim))
        for _ in range(8):
            pts = lo + (hi - lo) * engine.random(max(4 * count, 16))
            out = np.concatenate([out, pts[self.contains(pts)]])
            if len(out) >= count:
                return out[:count]
        raise DomainError("sampling box barely intersects the chart domain", None)


class TangentChart(Chart):
    """The chart on ``T^r M`` induced by a base chart.

    Coordinate ``λ n + i`` is ``x^i_λ`` (λ-major), labelled ``"(name,λ)"``.
    Only the ``λ = 0`` block is constrained by the base domain.
    """

    def __init__(self, base: Chart, r: int, velocity_box=(-1.0, 1.0)):
        if r < 1:
            raise ValueError("tangent order r must be at least 1")
        self.base = base
        self.r = int(r)
        names = tuple(f"({name},{lam})" for lam in range(r + 1) for name in base.names)
        box = list(base.box) + [tuple(velocity_box)] * (base.dim * r)
        Chart.__init__(self, names, (), box)

    def __repr__(self):
        return f"TangentChart({self.base!r}, r={self.r})"

    def contains(self, points):
        p = np.asarray(points, dtype=float)
        ok = np.all(np.isfinite(p), axis=-1)
        return ok & self.base.contains(p[..., : self.base.dim])

    def index(self, i: int, lam: int) -> int:
        return lam * self.base.dim + i

    def blocks(self, point) -> np.ndarray:
        """Reshape ``(..., n(r+1))`` coordinates to ``(..., r+1, n)``."""
        p = np.asarray(point, dtype=float)
        return p.reshape(p.shape[:-1] + (self.r + 1, self.base.dim))


# ---------------------------------------------------------------------------
# fields


def _compile_component(chart, item):
    if item is None:
        return None
    if isinstance(item, SmoothMap):
        if item.arity != chart.dim:
            raise ValueError(f"component arity {item.arity} does not match chart dimension {chart.dim}")
        return item
    if isinstance(item, str):
        return SmoothMap.parse(item, chart.names)
    if isinstance(item, (int, float)):
        v = float(item)
        return None if v == 0.0 else (lambda *args, v=v: v)
    if callable(item):
        return item
    raise TypeError(f"cannot use {item!r} as a field component")


def _components_fn(chart, comps, shape):
    flat = [_compile_component(chart, c) for c in np.asarray(comps, dtype=object).reshape(-1)]
    if len(flat) != max(1, math.prod(shape)):
        raise ValueError(f"expected {math.prod(shape)} components for shape {shape}")
    n = chart.dim

    def fn(x):
        args = [x[..., i] for i in range(n)]
        vals = [0.0 if f is None else f(*args) for f in flat]
        out = Jet.stack([Jet.coerce(v, x.alg) for v in vals], axis=-1)
        out = out.broadcast_to(x.shape[:-1] + (len(flat),))
        return out.reshape(x.shape[:-1] + shape)

    return fn


class Field:
    """A smooth field on a chart, evaluated through jets.

    ``upper`` counts the leading contravariant axes of ``shape``.
    """

    kind = "field"

    def __init__(self, chart: Chart, shape, fn, upper: int = 0, label: str = ""):
        self.chart = chart
        self.shape = tuple(shape)
        self.fn = fn
        self.upper = upper
        self.label = label

    @property
    def lower(self) -> int:
        return len(self.shape) - self.upper

    @classmethod
    def from_components(cls, chart, comps, upper=0, label=""):
        shape = np.asarray(comps, dtype=object).shape
        return cls(chart, shape, _components_fn(chart, comps, shape), upper, label)

    def __call__(self, x) -> Jet:
        x = as_point_jet(x)
        if x.shape[-1] != self.chart.dim:
            raise ValueError(f"expected {self.chart.dim} coordinates, got {x.shape[-1]}")
        out = Jet.coerce(self.fn(x), x.alg)
        want = x.shape[:-1] + self.shape
        if out.shape != want:
            out = out.broadcast_to(want)
        return out

    def at(self, points) -> np.ndarray:
        """Plain component values at ``points`` (shape ``(..., n)``)."""
        p = self.chart.check(points)
        return np.array(self(Jet.constant(p)).value)

    def __repr__(self):
        return f"{type(self).__name__}({self.chart!r}, shape={self.shape})"


def _rebuild(proto, fn, label=""):
    obj = object.__new__(type(proto))
    obj.__dict__.update(proto.__dict__)
    obj.fn = fn
    obj.label = label
    return obj


class ScalarField(Field):
    kind = "scalar"

    def __init__(self, chart, fn, label=""):
        super().__init__(chart, (), fn, 0, label)

    @classmethod
    def from_expression(cls, chart, text):
        return cls(chart, _components_fn(chart, text, ()))

    @classmethod
    def from_components(cls, chart, comps, **kw):
        return cls(chart, _components_fn(chart, comps, ()), **kw)


class VectorField(Field):
    kind = "vector"

    def __init__(self, chart, fn, label=""):
        super().__init__(chart, (chart.dim,), fn, 1, label)

    @classmethod
    def from_components(cls, chart, comps, **kw):
        return cls(chart, _components_fn(chart, comps, (chart.dim,)), **kw)


class OneForm(Field):
    kind = "one_form"

    def __init__(self, chart, fn, label=""):
        super().__init__(chart, (chart.dim,), fn, 0, label)

    @classmethod
    def from_components(cls, chart, comps, **kw):
        return cls(chart, _components_fn(chart, comps, (chart.dim,)), **kw)


class TensorField(Field):
    """Tensor of type ``(upper, lower)``; upper axes come first."""

    kind = "tensor"

    def __init__(self, chart, fn, upper=0, lower=2, label="", symmetric=False):
        super().__init__(chart, (chart.dim,) * (upper + lower), fn, upper, label)
        self.symmetric = symmetric

    @classmethod
    def from_components(cls, chart, comps, upper=0, lower=None, **kw):
        a = np.asarray(comps, dtype=object)
        lower = a.ndim - upper if lower is None else lower
        shape = (chart.dim,) * (upper + lower)
        return cls(chart, _components_fn(chart, comps, shape), upper=upper, lower=lower, **kw)


class CovariantTensor(TensorField):
    kind = "covariant"

    def __init__(self, chart, fn, valence=2, label="", symmetric=False):
        super().__init__(chart, fn, 0, valence, label, symmetric)

    @property
    def valence(self) -> int:
        return self.lower

    @classmethod
    def from_components(cls, chart, comps, valence=None, **kw):
        a = np.asarray(comps, dtype=object)
        valence = a.ndim if valence is None else valence
        return cls(chart, _components_fn(chart, comps, (chart.dim,) * valence), valence=valence, **kw)


class Metric(CovariantTensor):
    kind = "metric"

    def __init__(self, chart, fn, label=""):
        super().__init__(chart, fn, 2, label, symmetric=True)

    @classmethod
    def from_components(cls, chart, comps, **kw):
        return cls(chart, _components_fn(chart, comps, (chart.dim, chart.dim)), **kw)

    @classmethod
    def from_tensor(cls, K: Field) -> "Metric":
        if K.shape != (K.chart.dim,) * 2 or K.upper:
            raise ValueError("a metric is a (0,2) tensor")
        return cls(K.chart, K.fn, K.label)


class Connection(Field):
    """Affine connection given by its Christoffel symbols ``gamma[k, i, j]``."""

    kind = "connection"

    def __init__(self, chart, fn, label=""):
        super().__init__(chart, (chart.dim,) * 3, fn, 1, label)

    @classmethod
    def from_components(cls, chart, comps, **kw):
        return cls(chart, _components_fn(chart, comps, (chart.dim,) * 3), **kw)

    @classmethod
    def flat(cls, chart):
        n = chart.dim
        return cls(chart, lambda x: Jet.constant(np.zeros(x.shape[:-1] + (n, n, n)), x.alg))


def _maybe_at(field, point):
    return field if point is None else field.at(point)


# ---------------------------------------------------------------------------
# jet linear algebra


def rearrange(a: Jet, spec: str) -> Jet:
    """Permute trailing batch axes, e.g. ``rearrange(t, "ijk->kij")``."""
    src, dst = spec.split("->")
    return Jet(a.alg, np.einsum(f"...{src}Z->...{dst}Z", a.c))


def inverse(m: Jet, where=None) -> Jet:
    """Inverse of a batch of jet matrices.

    The real part is inverted directly; the nilpotent part is absorbed by
    Newton steps ``X <- X (2 - M X)``, each doubling the correct order, so the
    result is exact once ``2^k`` exceeds the algebra's nilpotency.
    """
    a0 = np.asarray(m.value)
    n = a0.shape[-1]
    sv = np.linalg.svd(a0, compute_uv=False)
    scale = np.maximum(1.0, sv[..., 0])
    bad = sv[..., -1] <= 1e-12 * scale
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        point = None if where is None else np.asarray(where.value)[idx]
        raise DegenerateError("singular matrix", point)
    x = Jet.constant(np.linalg.inv(a0), m.alg)
    if m.alg.size == 1:
        return x
    eye = np.eye(n)
    steps = max(1, math.ceil(math.log2(m.alg.nilpotency + 1)))
    for _ in range(steps):
        mx = einsum("...ij,...jk->...ik", m, x)
        x = einsum("...ij,...jk->...ik", x, (-mx) + 2 * eye)
    return x


def _dmetric(g, x):
    gv, dg = value_and_jacobian(g, x)
    return gv, rearrange(dg, "jli->ijl")  # d[i, j, l] = ∂_i g_jl


# ---------------------------------------------------------------------------
# connections from metrics


def levi_civita(g: Metric) -> Connection:
    """``Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)``."""

    def fn(x):
        gv, d = _dmetric(g, x)
        low = (d + rearrange(d, "jil->ijl") - rearrange(d, "lij->ijl")) * 0.5
        return einsum("...kl,...ijl->...kij", inverse(gv, x), low)

    return Connection(g.chart, fn, "levi_civita")


def lower_connection(g: Metric, nabla: Connection) -> Field:
    """``Γ_ijk = g_kl Γ^l_ij`` as a field of shape ``(n, n, n)``."""

    def fn(x):
        return einsum("...kl,...lij->...ijk", g(x), nabla(x))

    return Field(g.chart, (g.chart.dim,) * 3, fn, 0, "lowered")


def raise_connection(g: Metric, low: Field) -> Connection:
    def fn(x):
        return einsum("...kl,...ijl->...kij", inverse(g(x), x), low(x))

    return Connection(g.chart, fn)


def dual_connection(g: Metric, nabla: Connection) -> Connection:
    """The ``g``-conjugate: ``Γ*^k_ij = g^{kl}(∂_i g_jl − Γ^m_il g_mj)``."""

    def fn(x):
        gv, d = _dmetric(g, x)
        b = d - einsum("...mil,...mj->...ijl", nabla(x), gv)
        return einsum("...kl,...ijl->...kij", inverse(gv, x), b)

    return Connection(g.chart, fn, "dual")


def torsion(nabla: Connection, point=None):
    """``Tor^k_ij = Γ^k_ij − Γ^k_ji``; a (1,2) field, or its values at ``point``."""

    def fn(x):
        gam = nabla(x)
        return gam - rearrange(gam, "kji->kij")

    return _maybe_at(TensorField(nabla.chart, fn, 1, 2, "torsion"), point)


def curvature(nabla: Connection, point=None):
    """``R^l_kij = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik``."""

    def fn(x):
        gam, dgam = value_and_jacobian(nabla, x)  # dgam[a, b, c, i] = ∂_i Γ^a_bc
        lin = rearrange(dgam, "ljki->lkij") - rearrange(dgam, "likj->lkij")
        quad = einsum("...lim,...mjk->...lkij", gam, gam)
        return lin + (quad - rearrange(quad, "lkji->lkij"))

    return _maybe_at(TensorField(nabla.chart, fn, 1, 3, "curvature"), point)


def nabla_g(nabla: Connection, g: Metric, point=None):
    """``(∇_i g)_jk = ∂_i g_jk − Γ^m_ij g_mk − Γ^m_ik g_jm``."""

    def fn(x):
        gv, d = _dmetric(g, x)
        gam = nabla(x)
        a = einsum("...mij,...mk->...ijk", gam, gv)
        return d - a - rearrange(a, "ikj->ijk")

    return _maybe_at(CovariantTensor(g.chart, fn, 3, "nabla_g"), point)


def signature(g: Metric, point) -> tuple[int, int]:
    """``(p_plus, p_minus)`` of the component matrix at a single point."""
    m = np.asarray(g.at(point))
    if m.ndim != 2:
        raise ValueError("signature takes a single point")
    ev = np.linalg.eigvalsh(0.5 * (m + m.T))
    scale = max(1.0, float(np.max(np.abs(ev))))
    if np.min(np.abs(ev)) < 1e-10 * scale:
        raise DegenerateError("degenerate metric", point)
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def is_nondegenerate(g: Metric, points, rel=1e-10):
    """Minimum over ``points`` of ``|det g| / scale^n`` and the pass flag."""
    m = g.at(points).reshape(-1, g.chart.dim, g.chart.dim)
    scale = np.maximum(1.0, np.max(np.abs(m), axis=(-1, -2)))
    det = np.abs(np.linalg.det(m)) / scale ** g.chart.dim
    return float(np.min(det)), bool(np.all(det > rel))


# ---------------------------------------------------------------------------
# vector fields


def apply_vector(X: VectorField, f: ScalarField) -> ScalarField:
    """The function ``X f = X^i ∂_i f``."""

    def fn(x):
        _, df = value_and_jacobian(f, x)
        return einsum("...i,...i->...", X(x), df)

    return ScalarField(X.chart, fn)


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k``."""

    def fn(x):
        xv, dx = value_and_jacobian(X, x)
        yv, dy = value_and_jacobian(Y, x)
        return einsum("...ki,...i->...k", dy, xv) - einsum("...ki,...i->...k", dx, yv)

    return VectorField(X.chart, fn, "bracket")


def horizontal_lift(nabla: Connection, X: VectorField) -> VectorField:
    """``X^h = X^i ∂_{x^i} − X^i Γ^k_ij ẋ^j ∂_{ẋ^k}`` on ``T M`` with chart ``(x, ẋ)``."""
    tc = nabla.chart.tangent(1)
    n = nabla.chart.dim

    def fn(z):
        x, v = z[..., :n], z[..., n:]
        xv = X(x)
        gv = einsum("...kij,...j->...ki", nabla(x), v)
        vert = -einsum("...ki,...i->...k", gv, xv)
        return Jet.concatenate([xv, vert], axis=-1)

    return VectorField(tc, fn, "horizontal")


# ---------------------------------------------------------------------------
# coordinate changes


class CoordinateMap:
    """A diffeomorphism between charts given by forward and inverse maps.

    ``forward`` and ``inverse`` are sequences of SmoothMaps (or expression
    strings) in the source and target coordinate names respectively.
    """

    def __init__(self, source: Chart, target: Chart, forward, inverse):
        if source.dim != target.dim:
            raise ValueError("charts must have equal dimension")
        self.source = source
        self.target = target
        self.forward = forward if isinstance(forward, Field) else Field(
            source, (target.dim,), _components_fn(source, list(forward), (target.dim,)), 0, "forward"
        )
        self.inverse = inverse if isinstance(inverse, Field) else Field(
            target, (source.dim,), _components_fn(target, list(inverse), (source.dim,)), 0, "inverse"
        )

    def inverted(self) -> "CoordinateMap":
        return CoordinateMap(self.target, self.source, self.inverse, self.forward)

    def __call__(self, points) -> np.ndarray:
        return self.forward.at(points)

    def roundtrip_defect(self, points) -> float:
        p = np.asarray(points, dtype=float)
        y = self.forward.at(p)
        return float(np.max(np.abs(self.inverse.at(y) - p)))

    def _pullback(self, y):
        """``x(y)``, ``J = ∂x/∂y`` and ``J^{-1}`` at target points ``y``."""
        x, jac = value_and_jacobian(self.inverse, y)
        return x, jac, inverse(jac, y)


def transform_tensor(cmap: CoordinateMap, K: Field) -> Field:
    """Express ``K`` (upper axes first) in the target chart of ``cmap``."""
    up, low = K.upper, K.lower
    letters = "abcdefgh"

    def fn(y):
        _, jac, jinv = cmap._pullback(y)
        out = K(cmap.inverse(y))
        sub = letters[: up + low]
        for pos in range(up + low):
            new = sub[:pos] + "z" + sub[pos + 1:]
            if pos < up:
                out = einsum(f"...{sub},...z{sub[pos]}->...{new}", out, jinv)
            else:
                out = einsum(f"...{sub},...{sub[pos]}z->...{new}", out, jac)
        return out

    res = _rebuild(K, fn, K.label)
    res.chart = cmap.target
    return res


def transform_metric(cmap: CoordinateMap, g: Metric) -> Metric:
    return transform_tensor(cmap, g)


def transform_connection(cmap: CoordinateMap, nabla: Connection) -> Connection:
    """``Γ'^c_ab = (∂y^c/∂x^k)(Γ^k_ij ∂x^i/∂y^a ∂x^j/∂y^b + ∂²x^k/∂y^a∂y^b)``."""

    def fn(y):
        x, jac, hess = taylor_partials(cmap.inverse, y, 2)
        jinv = inverse(jac, y)
        gam = einsum("...kij,...ia->...kaj", nabla(x), jac)
        gam = einsum("...kaj,...jb->...kab", gam, jac)
        return einsum("...ck,...kab->...cab", jinv, gam + hess)

    return Connection(cmap.target, fn, nabla.label)
