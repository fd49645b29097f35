"""Named targets and the model definition file format.

A target bundles what the CLI and the verification suites need about one
model: a chart, its statistical structure, and (when available) a contrast
function and a potential.  Targets come from the built-in catalog or from a
line-oriented model file::

    schema_version = 1
    name = gaussian

    [chart]
    coordinates = mu, sigma
    domain = sigma
    box = -2 2; 0.5 3

    [density]
    sample = xi
    log_density = -(xi - mu)^2 / (2 * sigma^2) - log(sigma) - 0.5 * log(2 * pi)
    center = mu
    scale = sigma

    [quadrature]
    nodes = 200
    window = 12

Exactly one of ``[density]`` (keys ``density`` or ``log_density``, plus
optional ``sample``, ``center``, ``scale``), ``[potential]`` (key ``psi``)
or ``[contrast]`` (key ``F`` in the variables ``<name>_x``, ``<name>_y``)
defines the model.  Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contrast import ContrastFunction, contrast_structure
from .expr import ParseError, SmoothMap
from .geometry import Chart, CovariantTensor, Metric, ScalarField
from .jet import Jet, value_and_jacobian
from .models import DensityModel, ExponentialFamily, gaussian_structure, quartic_family
from .statistical import StatisticalStructure

SCHEMA_VERSION = 1


@dataclass
class Target:
    name: str
    structure: StatisticalStructure
    contrast: ContrastFunction | None = None
    psi: ScalarField | None = None
    quadrature: bool = False
    gaussian: bool = False

    @property
    def chart(self) -> Chart:
        return self.structure.chart


def bregman_contrast(psi: ScalarField) -> ContrastFunction:
    """``F(x, y) = ψ(y) − ψ(x) − ∂ψ(x)·(y − x)``, inducing ``g = ∂²ψ``."""

    def fn(x, y):
        px, dpx = value_and_jacobian(psi, x)
        return psi(y) - px - ((y - x) * dpx).sum(axis=-1)

    return ContrastFunction(psi.chart, fn, "bregman")


def _plane() -> Target:
    chart = Chart(("u", "v"), box=((-1.0, 1.0), (-1.0, 1.0)))
    g = Metric.from_components(chart, [[1, 0], [0, 1]], label="g")
    T = CovariantTensor.from_components(chart, np.zeros((2, 2, 2)), label="T", symmetric=True)
    psi = ScalarField.from_expression(chart, "(u^2 + v^2) / 2")
    F = ContrastFunction.from_expression(chart, "((u_x - u_y)^2 + (v_x - v_y)^2) / 2")
    return Target("plane", StatisticalStructure(g, T, "plane"), F, psi)


def _exp_quadratic() -> Target:
    chart = Chart(("x",), box=((-1.0, 1.0),))
    F = ContrastFunction.from_expression(chart, "0.5 * exp(x_x) * (x_x - x_y)^2")
    return Target("exp_quadratic", contrast_structure(F), F)


def builtin_target(name: str, nodes: int = 200, window: float = 12.0) -> Target:
    if name == "gaussian":
        m = gaussian_structure(nodes, window)
        return Target("gaussian", m.structure, m.density.kl_contrast(), quadrature=True, gaussian=True)
    if name == "quartic":
        fam = quartic_family()
        return Target("quartic", fam.structure(), bregman_contrast(fam.psi), fam.psi)
    if name == "plane":
        return _plane()
    if name == "exp_quadratic":
        return _exp_quadratic()
    raise KeyError(f"unknown model {name!r}; built-in models are {', '.join(BUILTIN_TARGETS)}")


BUILTIN_TARGETS = ("exp_quadratic", "gaussian", "plane", "quartic")


# ---------------------------------------------------------------------------
# model files


@dataclass
class _Entry:
    value: str
    line: int
    col: int


_SECTIONS = {
    "chart": {"coordinates", "domain", "box"},
    "density": {"density", "log_density", "sample", "center", "scale"},
    "potential": {"psi"},
    "contrast": {"F"},
    "quadrature": {"nodes", "window"},
}


def _scan(text: str):
    top: dict[str, _Entry] = {}
    sections: dict[str, dict[str, _Entry]] = {}
    current = top
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, indent + 1)
            name = stripped[1:-1].strip()
            if name not in _SECTIONS:
                raise ParseError(f"unknown section [{name}]", lineno, indent + 2)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", lineno, indent + 2)
            current = sections[name] = {}
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", lineno, indent + 1)
        key, value = stripped.split("=", 1)
        key = key.strip()
        allowed = {"schema_version", "name"} if current is top else _SECTIONS[_section_of(sections, current)]
        if key not in allowed:
            raise ParseError(f"unknown key {key!r}", lineno, indent + 1)
        if key in current:
            raise ParseError(f"duplicate key {key!r}", lineno, indent + 1)
        vcol = indent + stripped.index("=") + 2
        vcol += len(value) - len(value.lstrip())
        current[key] = _Entry(value.strip(), lineno, vcol)
    return top, sections


def _section_of(sections, current):
    for name, body in sections.items():
        if body is current:
            return name
    raise AssertionError("section not found")


def _require(body: dict, key: str, where: str, line: int) -> _Entry:
    if key not in body:
        raise ParseError(f"missing key {key!r} in {where}", line, 1)
    return body[key]


def _number(entry: _Entry, kind=float):
    try:
        return kind(entry.value)
    except ValueError:
        raise ParseError(f"expected a number, got {entry.value!r}", entry.line, entry.col) from None


def _expr(entry: _Entry, names) -> SmoothMap:
    return SmoothMap.parse(entry.value, names, entry.line, entry.col)


def _chart(body: dict) -> Chart:
    coords = _require(body, "coordinates", "[chart]", 1)
    names = tuple(s.strip() for s in coords.value.split(","))
    if not all(n.isidentifier() for n in names):
        raise ParseError("coordinates must be comma-separated identifiers", coords.line, coords.col)
    domain = ()
    if "domain" in body:
        d = body["domain"]
        domain = tuple(_expr(_Entry(part, d.line, d.col), names) for part in d.value.split(";"))
    box = None
    if "box" in body:
        b = body["box"]
        try:
            box = [tuple(float(v) for v in part.split()) for part in b.value.split(";")]
        except ValueError:
            raise ParseError("box must be ';'-separated 'lo hi' pairs", b.line, b.col) from None
        if len(box) != len(names) or any(len(iv) != 2 or not iv[0] < iv[1] for iv in box):
            raise ParseError("box needs one increasing 'lo hi' pair per coordinate", b.line, b.col)
    return Chart(names, domain, box)


def parse_model_text(text: str, nodes: int | None = None, window: float | None = None) -> Target:
    """Build a :class:`Target` from model-file text; ``nodes``/``window`` override the file."""
    top, sections = _scan(text)
    version = _require(top, "schema_version", "the header", 1)
    if _number(version, int) != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version.value}", version.line, version.col)
    name = top["name"].value if "name" in top else "model"
    if "chart" not in sections:
        raise ParseError("missing [chart] section", 1, 1)
    chart = _chart(sections["chart"])
    kinds = [k for k in ("density", "potential", "contrast") if k in sections]
    if len(kinds) != 1:
        raise ParseError("exactly one of [density], [potential], [contrast] is required", 1, 1)
    kind = kinds[0]
    body = sections[kind]
    if kind == "potential":
        psi = ScalarField.from_components(chart, _expr(_require(body, "psi", "[potential]", 1), chart.names))
        fam = ExponentialFamily(chart, psi)
        return Target(name, fam.structure(), bregman_contrast(fam.psi), fam.psi)
    if kind == "contrast":
        e = _require(body, "F", "[contrast]", 1)
        F = ContrastFunction.from_expression(chart, e.value, e.line, e.col)
        return Target(name, contrast_structure(F), F)
    quad = sections.get("quadrature", {})
    q_nodes = nodes if nodes is not None else (_number(quad["nodes"], int) if "nodes" in quad else 200)
    q_window = window if window is not None else (_number(quad["window"]) if "window" in quad else 12.0)
    sample = body["sample"].value if "sample" in body else "xi"
    full = (sample,) + chart.names
    if ("density" in body) == ("log_density" in body):
        raise ParseError("[density] needs exactly one of 'density' or 'log_density'", 1, 1)
    dens = _expr(body["density"], full) if "density" in body else None
    logd = _expr(body["log_density"], full) if "log_density" in body else None
    center = _expr(body["center"], chart.names) if "center" in body else None
    scale = _expr(body["scale"], chart.names) if "scale" in body else None
    model = DensityModel(chart, dens, logd, center, scale, q_nodes, q_window, sample)
    return Target(name, model.structure(), model.kl_contrast(), quadrature=True)


def load_model_file(path, nodes: int | None = None, window: float | None = None) -> Target:
    with open(path, encoding="utf-8") as fh:
        return parse_model_text(fh.read(), nodes, window)


def resolve_target(name=None, path=None, nodes: int | None = None, window: float | None = None) -> Target:
    if (name is None) == (path is None):
        raise ValueError("give exactly one of a model name or a model file")
    if path is not None:
        return load_model_file(path, nodes, window)
    return builtin_target(name, 200 if nodes is None else nodes, 12.0 if window is None else window)
