"""Multivariate truncated Taylor arithmetic ("jets").

A :class:`Jet` is a batch of elements of a truncated polynomial algebra.  The
algebra is a tensor product of *blocks*; block ``(m, d)`` holds polynomials
in ``m`` nilpotent variables truncated at total degree ``d``.  Blocks are the
nesting device: a univariate block ``(1, r)`` carries a curve jet of order
``r`` (a point of ``T^r M``), a block ``(n, 1)`` carries a first-order
directional derivative in ``n`` coordinates, and so on.  Appending a block
to the algebra of an existing jet and later reading off its coefficients is
exactly nested forward-mode differentiation, so derivatives of arbitrarily
derived objects (Christoffel symbols of a lifted metric, curvature of a
lifted connection, ...) are computed without truncation error.

Coefficient arrays have shape ``batch_shape + (algebra.size,)``.  Batch axes
carry both tensor indices and sample points.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from numbers import Real
from types import SimpleNamespace

import numpy as np

from . import _kernels
from .series import DomainError


@lru_cache(maxsize=None)
def block_monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of a block in graded order (degree, then lexicographic)."""
    monos = []
    for deg in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            monos.append(tuple(e))
    return tuple(monos)


@lru_cache(maxsize=None)
def _block_index(nvars: int, degree: int) -> dict:
    return {e: i for i, e in enumerate(block_monomials(nvars, degree))}


@lru_cache(maxsize=None)
def _block_table(nvars: int, degree: int):
    monos = block_monomials(nvars, degree)
    index = _block_index(nvars, degree)
    ia, ib, ic = [], [], []
    for i, ea in enumerate(monos):
        da = sum(ea)
        for j, eb in enumerate(monos):
            if da + sum(eb) > degree:
                continue
            ia.append(i)
            ib.append(j)
            ic.append(index[tuple(x + y for x, y in zip(ea, eb))])
    return np.array(ia), np.array(ib), np.array(ic)


class Algebra:
    """Tensor product of total-degree-truncated polynomial blocks.

    Instances are interned: ``Algebra.get(blocks)`` returns the same object
    for equal block tuples, so algebra identity can be checked with ``is``.
    """

    _interned: dict = {}

    def __init__(self, blocks):
        self.blocks = tuple((int(m), int(d)) for m, d in blocks)
        self.block_sizes = tuple(len(block_monomials(m, d)) for m, d in self.blocks)
        self.size = int(np.prod(self.block_sizes, dtype=np.int64)) if self.blocks else 1
        self.nilpotency = sum(d for _, d in self.blocks)
        self._table = None

    @classmethod
    def get(cls, blocks=()) -> "Algebra":
        key = tuple((int(m), int(d)) for m, d in blocks)
        alg = cls._interned.get(key)
        if alg is None:
            alg = cls._interned[key] = cls(key)
        return alg

    def extend(self, nvars: int, degree: int) -> "Algebra":
        return Algebra.get(self.blocks + ((nvars, degree),))

    @property
    def base(self) -> "Algebra":
        """The algebra without its last block."""
        return Algebra.get(self.blocks[:-1])

    @property
    def table(self):
        if self._table is None:
            ia = np.zeros(1, dtype=np.int64)
            ib = np.zeros(1, dtype=np.int64)
            ic = np.zeros(1, dtype=np.int64)
            for (m, d), n in zip(self.blocks, self.block_sizes):
                ta, tb, tc = _block_table(m, d)
                ia = (ia[:, None] * n + ta[None, :]).ravel()
                ib = (ib[:, None] * n + tb[None, :]).ravel()
                ic = (ic[:, None] * n + tc[None, :]).ravel()
            order = np.argsort(ic, kind="stable")
            ia, ib, ic = ia[order], ib[order], ic[order]
            starts = np.flatnonzero(np.r_[True, ic[1:] != ic[:-1]])
            self._table = SimpleNamespace(
                ia=np.ascontiguousarray(ia),
                ib=np.ascontiguousarray(ib),
                ic=np.ascontiguousarray(ic),
                starts=starts,
                size=self.size,
            )
        return self._table

    def monomial_index(self, *block_exponents) -> int:
        """Flat index of the monomial with the given per-block exponents."""
        idx = 0
        for (m, d), n, e in zip(self.blocks, self.block_sizes, block_exponents):
            idx = idx * n + _block_index(m, d)[tuple(e)]
        return idx

    def __repr__(self):
        return f"Algebra({self.blocks})"


SCALARS = Algebra.get(())


def _as_array(x):
    return np.asarray(x, dtype=float)


class Jet:
    """A batch of truncated multivariate Taylor polynomials.

    ``c`` has shape ``shape + (alg.size,)``; ``c[..., 0]`` is the value.
    Jets are treated as immutable; every operation returns a new jet.
    """

    __slots__ = ("alg", "c")
    __array_ufunc__ = None

    def __init__(self, alg: Algebra, c):
        self.alg = alg
        self.c = c

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value, alg: Algebra = SCALARS) -> "Jet":
        v = _as_array(value)
        c = np.zeros(v.shape + (alg.size,))
        c[..., 0] = v
        return cls(alg, c)

    @classmethod
    def coerce(cls, x, alg: Algebra | None = None) -> "Jet":
        if isinstance(x, Jet):
            if alg is not None and x.alg is not alg:
                raise ValueError(f"algebra mismatch: {x.alg} vs {alg}")
            return x
        return cls.constant(x, SCALARS if alg is None else alg)

    @classmethod
    def stack(cls, jets, axis=0) -> "Jet":
        jets = list(jets)
        alg = next((j.alg for j in jets if isinstance(j, Jet)), SCALARS)
        cs = [cls.coerce(j, alg).c for j in jets]
        shape = np.broadcast_shapes(*(c.shape for c in cs))
        cs = [np.broadcast_to(c, shape) for c in cs]
        ndim = len(shape) - 1
        if axis < 0:
            axis += ndim + 1
        return cls(alg, np.stack(cs, axis=axis))

    @classmethod
    def concatenate(cls, jets, axis=-1) -> "Jet":
        jets = list(jets)
        alg = next((j.alg for j in jets if isinstance(j, Jet)), SCALARS)
        cs = [cls.coerce(j, alg).c for j in jets]
        ndim = cs[0].ndim - 1
        if axis < 0:
            axis += ndim
        return cls(alg, np.concatenate(cs, axis=axis))

    # -- batch structure ----------------------------------------------------

    @property
    def shape(self) -> tuple:
        return self.c.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.c.ndim - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0]

    def __repr__(self):
        return f"Jet(shape={self.shape}, {self.alg})"

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        front = np.moveaxis(self.c, -1, 0)[(slice(None),) + key]
        return Jet(self.alg, np.moveaxis(front, 0, -1))

    def _axis(self, axis):
        return axis + self.ndim if axis < 0 else axis

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(self.ndim))
        elif isinstance(axis, int):
            axis = (self._axis(axis),)
        else:
            axis = tuple(self._axis(a) for a in axis)
        return Jet(self.alg, self.c.sum(axis=axis))

    def transpose(self, *axes) -> "Jet":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return Jet(self.alg, self.c.transpose(tuple(axes) + (self.ndim,)))

    def swapaxes(self, a, b) -> "Jet":
        return Jet(self.alg, np.swapaxes(self.c, self._axis(a), self._axis(b)))

    def moveaxis(self, src, dst) -> "Jet":
        return Jet(self.alg, np.moveaxis(self.c, self._axis(src), self._axis(dst)))

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Jet(self.alg, self.c.reshape(tuple(shape) + (self.alg.size,)))

    def broadcast_to(self, shape) -> "Jet":
        return Jet(self.alg, np.broadcast_to(self.c, tuple(shape) + (self.alg.size,)))

    def expand_dims(self, axis) -> "Jet":
        if axis < 0:
            axis += self.ndim + 1
        return Jet(self.alg, np.expand_dims(self.c, axis))

    # -- algebra nesting ----------------------------------------------------

    def embed(self, alg: Algebra) -> "Jet":
        """Include into ``alg``, an extension of ``self.alg`` by trailing blocks."""
        if alg is self.alg:
            return self
        if alg.blocks[: len(self.alg.blocks)] != self.alg.blocks:
            raise ValueError(f"{alg} does not extend {self.alg}")
        extra = alg.size // self.alg.size
        c = np.zeros(self.shape + (self.alg.size, extra))
        c[..., 0] = self.c
        return Jet(alg, c.reshape(self.shape + (alg.size,)))

    def last_block(self) -> "Jet":
        """Coefficients along the last block, as a jet over the base algebra.

        The result has one more batch axis (of the block's size) than ``self``.
        """
        base = self.alg.base
        nb = self.alg.block_sizes[-1]
        c = self.c.reshape(self.shape + (base.size, nb))
        return Jet(base, np.swapaxes(c, -1, -2))

    # -- arithmetic ---------------------------------------------------------

    def _other(self, other):
        if isinstance(other, Jet):
            if other.alg is not self.alg:
                raise ValueError(f"algebra mismatch: {self.alg} vs {other.alg}")
            return other
        if isinstance(other, (Real, np.ndarray, np.generic)):
            return None
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o is None:
            v = _as_array(other)
            shape = np.broadcast_shapes(self.shape, v.shape)
            c = np.array(np.broadcast_to(self.c, shape + (self.alg.size,)))
            c[..., 0] += v
            return Jet(self.alg, c)
        return Jet(self.alg, self.c + o.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.alg, -self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self + (-_as_array(other))
        return Jet(self.alg, self.c - o.c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o is None:
            return Jet(self.alg, self.c * _as_array(other)[..., None])
        return _mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o is None:
            v = _as_array(other)
            if np.any(v == 0):
                raise DomainError("division by zero", v)
            return Jet(self.alg, self.c / v[..., None])
        return _mul(self, o.reciprocal())

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return (exponent * self.log()).exp()
        return self.power(float(exponent))

    def __rpow__(self, base):
        base = float(base)
        if base <= 0:
            raise DomainError("base of a jet power must be positive", base)
        return (self * math.log(base)).exp()

    # -- elementary functions ----------------------------------------------

    def _compose(self, coeffs):
        """Evaluate ``sum_j coeffs[j] * h^j`` with ``h = self - value``."""
        if len(coeffs) == 1 or self.alg.size == 1:
            return Jet.constant(coeffs[0], self.alg)
        h = Jet(self.alg, self.c.copy())
        h.c[..., 0] = 0.0
        result = Jet.constant(coeffs[-1], self.alg)
        for cj in reversed(coeffs[:-1]):
            result = _mul(result, h) + cj
        return result

    def exp(self):
        a0 = self.value
        e = np.exp(a0)
        return self._compose([e / math.factorial(j) for j in range(self.alg.nilpotency + 1)])

    def log(self):
        a0 = self.value
        if np.any(~(a0 > 0)):
            bad = a0[~(a0 > 0)]
            raise DomainError(f"log requires a positive constant term, got {bad.ravel()[0]!r}", bad)
        coeffs = [np.log(a0)]
        for j in range(1, self.alg.nilpotency + 1):
            coeffs.append((-1) ** (j + 1) / (j * a0**j))
        return self._compose(coeffs)

    def reciprocal(self):
        a0 = self.value
        if np.any(a0 == 0):
            raise DomainError("division by a jet with zero constant term", a0[a0 == 0])
        return self._compose([(-1) ** j / a0 ** (j + 1) for j in range(self.alg.nilpotency + 1)])

    def power(self, alpha: float):
        if float(alpha).is_integer() and abs(alpha) <= 64:
            n = int(alpha)
            if n < 0:
                return self.reciprocal().power(-n)
            result = Jet.constant(np.ones(self.shape), self.alg)
            base = self
            while n:
                if n & 1:
                    result = _mul(result, base)
                n >>= 1
                if n:
                    base = _mul(base, base)
            return result
        a0 = self.value
        if np.any(~(a0 > 0)):
            bad = a0[~(a0 > 0)]
            raise DomainError(
                f"non-integer power requires a positive constant term, got {bad.ravel()[0]!r}", bad
            )
        coeffs = []
        binom = 1.0
        for j in range(self.alg.nilpotency + 1):
            coeffs.append(binom * a0 ** (alpha - j))
            binom *= (alpha - j) / (j + 1)
        return self._compose(coeffs)

    def sqrt(self):
        a0 = self.value
        if self.alg.size == 1:
            if np.any(a0 < 0):
                raise DomainError("sqrt of a negative number", a0[a0 < 0])
            return Jet.constant(np.sqrt(a0), self.alg)
        return self.power(0.5)


def _mul(a: Jet, b: Jet) -> Jet:
    alg = a.alg
    shape = np.broadcast_shapes(a.shape, b.shape)
    if alg.size == 1:
        return Jet(alg, a.c * b.c)
    ac = np.broadcast_to(a.c, shape + (alg.size,)).reshape(-1, alg.size)
    bc = np.broadcast_to(b.c, shape + (alg.size,)).reshape(-1, alg.size)
    out = _kernels.backend.mul_table(ac, bc, alg.table)
    return Jet(alg, out.reshape(shape + (alg.size,)))


# ---------------------------------------------------------------------------
# seeding and reading derivatives


def seed(x: Jet, degree: int = 1) -> Jet:
    """Append a block ``(n, degree)`` and add variable ``t_i`` to ``x[..., i]``."""
    n = x.shape[-1]
    alg = x.alg.extend(n, degree)
    xs = x.embed(alg)
    c = np.array(xs.c)
    c = c.reshape(x.shape + (x.alg.size, alg.block_sizes[-1]))
    idx = np.arange(n)
    c[..., idx, 0, 1 + idx] += 1.0
    return Jet(alg, c.reshape(x.shape + (alg.size,)))


def as_point_jet(x) -> Jet:
    """Points (floats, arrays) become jets over the scalar algebra."""
    if isinstance(x, Jet):
        return x
    return Jet.constant(np.asarray(x, dtype=float))


def value_and_jacobian(fn, x):
    """Return ``(fn(x), d fn / d x)`` with the derivative index appended last."""
    x = as_point_jet(x)
    y = fn(seed(x, 1))
    coeffs = y.last_block()
    return coeffs[..., 0], coeffs[..., 1:]


def jacobian(fn, x):
    return value_and_jacobian(fn, x)[1]


@lru_cache(maxsize=None)
def _partial_gather(nvars: int, degree: int, order: int):
    """Index and factorial weight turning block coefficients into a dense
    symmetric tensor of ``order``-th partial derivatives."""
    index = _block_index(nvars, degree)
    shape = (nvars,) * order
    idx = np.zeros(shape, dtype=np.int64)
    weight = np.zeros(shape)
    for multi in itertools.product(range(nvars), repeat=order):
        e = [0] * nvars
        for v in multi:
            e[v] += 1
        idx[multi] = index[tuple(e)]
        weight[multi] = math.prod(math.factorial(k) for k in e)
    return idx, weight


def taylor_partials(fn, x, degree: int):
    """All partial derivatives of ``fn`` at ``x`` up to total ``degree``.

    Returns a list ``[value, grad, hess, ...]``; entry ``k`` has the output
    shape followed by ``k`` derivative axes.  One evaluation of ``fn`` on a
    single total-degree block serves every order.
    """
    x = as_point_jet(x)
    n = x.shape[-1]
    y = fn(seed(x, degree))
    coeffs = y.last_block()
    out = [coeffs[..., 0]]
    for k in range(1, degree + 1):
        idx, weight = _partial_gather(n, degree, k)
        out.append(coeffs[..., idx] * weight)
    return out


def derivative(f, point, idx) -> float:
    """Exact mixed partial ``d^|idx| f / prod dx_i^idx_i`` at ``point``.

    Each differentiated variable gets its own univariate block ``(1, k)``, so
    the evaluation is a nest of single-direction jets.  ``f`` is any callable
    accepting jets (e.g. a :class:`~statlift.expr.SmoothMap`).
    """
    idx = tuple(int(k) for k in idx)
    point = [float(p) for p in point]
    if len(idx) != len(point):
        raise ValueError("multi-index length must match the point dimension")
    if any(k < 0 for k in idx):
        raise ValueError("multi-index entries must be non-negative")
    if sum(idx) > 4:
        raise ValueError("total derivative order is limited to 4")
    active = [i for i, k in enumerate(idx) if k > 0]
    alg = Algebra.get([(1, idx[i]) for i in active])
    args = []
    for i, p in enumerate(point):
        arg = Jet.constant(p, alg)
        if i in active:
            pos = active.index(i)
            exps = [(0,)] * len(active)
            exps[pos] = (1,)
            arg.c[alg.monomial_index(*exps)] += 1.0
        args.append(arg)
    y = f(*args)
    if not isinstance(y, Jet):
        return 0.0 if active else float(y)
    target = alg.monomial_index(*[(idx[i],) for i in active])
    return float(y.c[..., target]) * math.prod(math.factorial(k) for k in idx)


def fd_oracle(f, point, idx, h: float = 1e-4) -> float:
    """Central finite-difference estimate of the partial ``idx`` (test oracle).

    Applied one direction at a time, so a multi-index of total order ``k``
    costs ``2^k`` real evaluations.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    point = np.asarray(point, dtype=float)
    dirs = [i for i, k in enumerate(idx) for _ in range(int(k))]

    def rec(p, remaining):
        if not remaining:
            return float(f(*p))
        i = remaining[0]
        e = np.zeros_like(p)
        e[i] = h
        return (rec(p + e, remaining[1:]) - rec(p - e, remaining[1:])) / (2 * h)

    return rec(point, dirs)


# ---------------------------------------------------------------------------
# tensor contraction of jets

_EINSUM_CHUNK = 1 << 22


def einsum(subscripts: str, a, b) -> Jet:
    """``np.einsum`` for two jet operands, with jet multiplication.

    Each retained monomial pair of the multiplication table contributes one
    ordinary einsum; pairs are processed in chunks of whole target monomials
    so memory stays bounded and summation order is fixed.
    """
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return Jet.constant(np.einsum(subscripts, a, b))
    alg = a.alg if isinstance(a, Jet) else b.alg
    a = Jet.coerce(a, alg)
    b = Jet.coerce(b, alg)
    lhs, out_sub = subscripts.replace(" ", "").split("->")
    sa, sb = lhs.split(",")
    spec = f"{sa}Z,{sb}Z->{out_sub}Z"
    if alg.size == 1:
        return Jet(alg, np.einsum(spec, a.c, b.c))
    t = alg.table
    per_pair = max(a.c[..., 0].size, b.c[..., 0].size, 1)
    bounds = list(t.starts) + [len(t.ia)]
    groups = []
    lo = 0
    while lo < len(t.starts):
        hi = lo + 1
        while hi < len(t.starts) and (bounds[hi + 1] - bounds[lo]) * per_pair <= _EINSUM_CHUNK:
            hi += 1
        groups.append((lo, hi))
        lo = hi
    parts = []
    for lo, hi in groups:
        sl = slice(bounds[lo], bounds[hi])
        prod = np.einsum(spec, a.c[..., t.ia[sl]], b.c[..., t.ib[sl]])
        parts.append(np.add.reduceat(prod, np.asarray(t.starts[lo:hi]) - bounds[lo], axis=-1))
    return Jet(alg, np.concatenate(parts, axis=-1))
