"""Hot inner loops of the jet arithmetic.

Every kernel exists twice: a numba ``@njit`` version and a pure numpy
version with identical semantics.  The numba path is used when numba imports
cleanly and the environment variable ``STATLIFT_DISABLE_NUMBA`` is unset (or
``0``).  Both implementations are always importable as ``numba_kernels`` /
``numpy_kernels`` so tests and the benchmark can compare them directly.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None
    HAVE_NUMBA = False


def _flag_disabled() -> bool:
    return os.environ.get("STATLIFT_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# numpy implementations


def _np_mul_table(a, b, table):
    """Truncated product through a precomputed monomial table.

    ``a`` and ``b`` are ``(batch, size)``; the table lists every pair
    ``(ia[t], ib[t])`` whose exponent sum is a retained monomial, sorted by
    the target monomial ``ic[t]``; ``starts`` marks where each run begins.
    """
    prod = a[:, table.ia] * b[:, table.ib]
    return np.add.reduceat(prod, table.starts, axis=1)


def _np_cauchy(a, b):
    n = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for k in range(n):
        out[..., k] = np.sum(a[..., : k + 1] * b[..., k::-1], axis=-1)
    return out


def _np_series_div(a, b):
    n = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for k in range(n):
        acc = a[..., k].copy()
        for j in range(1, k + 1):
            acc = acc - b[..., j] * out[..., k - j]
        out[..., k] = acc / b[..., 0]
    return out


def _np_series_exp(a):
    n = a.shape[-1]
    out = np.zeros(a.shape)
    out[..., 0] = np.exp(a[..., 0])
    for k in range(1, n):
        acc = np.zeros(a.shape[:-1])
        for j in range(1, k + 1):
            acc = acc + j * a[..., j] * out[..., k - j]
        out[..., k] = acc / k
    return out


def _np_series_log(a):
    n = a.shape[-1]
    out = np.zeros(a.shape)
    out[..., 0] = np.log(a[..., 0])
    for k in range(1, n):
        acc = np.zeros(a.shape[:-1])
        for j in range(1, k):
            acc = acc + j * out[..., j] * a[..., k - j]
        out[..., k] = (a[..., k] - acc / k) / a[..., 0]
    return out


def _np_series_pow(a, alpha):
    n = a.shape[-1]
    out = np.zeros(a.shape)
    out[..., 0] = a[..., 0] ** alpha
    for k in range(1, n):
        acc = np.zeros(a.shape[:-1])
        for j in range(1, k + 1):
            acc = acc + ((alpha + 1.0) * j - k) * a[..., j] * out[..., k - j]
        out[..., k] = acc / (k * a[..., 0])
    return out


numpy_kernels = SimpleNamespace(
    name="numpy",
    mul_table=_np_mul_table,
    cauchy=_np_cauchy,
    series_div=_np_series_div,
    series_exp=_np_series_exp,
    series_log=_np_series_log,
    series_pow=_np_series_pow,
)


# ---------------------------------------------------------------------------
# numba implementations (series kernels loop over a (batch, order+1) array)

if HAVE_NUMBA:

    @nb.njit(cache=True)
    def _nb_mul_table_impl(a, b, ia, ib, ic, nout):
        nbatch = a.shape[0]
        out = np.zeros((nbatch, nout))
        ntab = ia.shape[0]
        for p in range(nbatch):
            for t in range(ntab):
                out[p, ic[t]] += a[p, ia[t]] * b[p, ib[t]]
        return out

    @nb.njit(cache=True)
    def _nb_cauchy(a, b):
        nbatch, n = a.shape
        out = np.zeros((nbatch, n))
        for p in range(nbatch):
            for k in range(n):
                s = 0.0
                for j in range(k + 1):
                    s += a[p, j] * b[p, k - j]
                out[p, k] = s
        return out

    @nb.njit(cache=True)
    def _nb_series_div(a, b):
        nbatch, n = a.shape
        out = np.zeros((nbatch, n))
        for p in range(nbatch):
            for k in range(n):
                s = a[p, k]
                for j in range(1, k + 1):
                    s -= b[p, j] * out[p, k - j]
                out[p, k] = s / b[p, 0]
        return out

    @nb.njit(cache=True)
    def _nb_series_exp(a):
        nbatch, n = a.shape
        out = np.zeros((nbatch, n))
        for p in range(nbatch):
            out[p, 0] = np.exp(a[p, 0])
            for k in range(1, n):
                s = 0.0
                for j in range(1, k + 1):
                    s += j * a[p, j] * out[p, k - j]
                out[p, k] = s / k
        return out

    @nb.njit(cache=True)
    def _nb_series_log(a):
        nbatch, n = a.shape
        out = np.zeros((nbatch, n))
        for p in range(nbatch):
            out[p, 0] = np.log(a[p, 0])
            for k in range(1, n):
                s = 0.0
                for j in range(1, k):
                    s += j * out[p, j] * a[p, k - j]
                out[p, k] = (a[p, k] - s / k) / a[p, 0]
        return out

    @nb.njit(cache=True)
    def _nb_series_pow(a, alpha):
        nbatch, n = a.shape
        out = np.zeros((nbatch, n))
        for p in range(nbatch):
            out[p, 0] = a[p, 0] ** alpha
            for k in range(1, n):
                s = 0.0
                for j in range(1, k + 1):
                    s += ((alpha + 1.0) * j - k) * a[p, j] * out[p, k - j]
                out[p, k] = s / (k * a[p, 0])
        return out

    def _nb_mul_table(a, b, table):
        return _nb_mul_table_impl(
            np.ascontiguousarray(a), np.ascontiguousarray(b),
            table.ia, table.ib, table.ic, table.size,
        )

    def _batched(kernel):
        """Flatten broadcast leading axes to one batch axis around ``kernel``."""

        def run(*arrays, **kw):
            arrays = [np.asarray(x, dtype=float) for x in arrays]
            shape = np.broadcast_shapes(*(x.shape for x in arrays))
            flat = [np.ascontiguousarray(np.broadcast_to(x, shape).reshape(-1, shape[-1])) for x in arrays]
            return kernel(*flat, *kw.values()).reshape(shape)

        return run

    def _nb_pow(a, alpha):
        return _batched(_nb_series_pow)(a, alpha=float(alpha))

    numba_kernels = SimpleNamespace(
        name="numba",
        mul_table=_nb_mul_table,
        cauchy=_batched(_nb_cauchy),
        series_div=_batched(_nb_series_div),
        series_exp=_batched(_nb_series_exp),
        series_log=_batched(_nb_series_log),
        series_pow=_nb_pow,
    )
else:  # pragma: no cover
    numba_kernels = None


def select_backend(name: str | None = None):
    """Return the kernel namespace for ``name`` (``"numba"``/``"numpy"``).

    With no name, numba is chosen unless disabled by the environment flag.
    """
    if name is None:
        name = "numpy" if (_flag_disabled() or not HAVE_NUMBA) else "numba"
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not available")
        return numba_kernels
    if name == "numpy":
        return numpy_kernels
    raise ValueError(f"unknown backend {name!r}")


backend = select_backend()


def set_backend(name: str | None) -> None:
    """Switch the process-wide backend (used by the benchmark and tests)."""
    global backend
    backend = select_backend(name)
