"""JSON and CSV output for evaluated tensors and connections.

JSON layout (``schema_version`` 1)::

    {
      "schema_version": 1,
      "command": "model",
      "model": "gaussian",
      "chart": {"coordinates": ["mu", "sigma"], "base": ["mu", "sigma"], "r": 0},
      "evaluations": [
        {"point": [0.0, 1.0],
         "objects": {"metric": {"kind": "metric", "valence": [0, 2], "index_order": "ij",
                                "shape": [2, 2], "data": [1.0, 0.0, 0.0, 2.0]}}}
      ]
    }

``data`` is row-major over ``index_order``; upper indices come first.
Coordinates of ``T^r M`` are labelled ``"(name,λ)"`` in λ-major order.
Floats use Python's shortest round-trip ``repr`` and keys are sorted, so
equal inputs give byte-identical output.
"""
from __future__ import annotations

import csv
import io
import itertools
import json

import numpy as np

from .geometry import Chart, Field, TangentChart

SCHEMA_VERSION = 1


def chart_info(chart: Chart) -> dict:
    if isinstance(chart, TangentChart):
        return {"coordinates": list(chart.names), "base": list(chart.base.names), "r": chart.r}
    return {"coordinates": list(chart.names), "base": list(chart.names), "r": 0}


def _index_order(upper: int, lower: int) -> str:
    return "klmn"[:upper] + "ijabcd"[:lower]


def encode_object(field: Field, values: np.ndarray) -> dict:
    values = np.asarray(values, dtype=float)
    upper = field.upper
    lower = len(field.shape) - upper
    return {
        "kind": field.kind,
        "valence": [upper, lower],
        "index_order": _index_order(upper, lower),
        "shape": list(values.shape),
        "data": [float(v) for v in values.reshape(-1)],
    }


def document(command: str, model: str, chart: Chart, evaluations, extra=None) -> dict:
    """``evaluations`` is a list of ``(point, {name: (field, values)})``."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "model": model,
        "chart": chart_info(chart),
        "evaluations": [
            {
                "point": [float(v) for v in np.asarray(point).reshape(-1)],
                "objects": {name: encode_object(f, v) for name, (f, v) in objects.items()},
            }
            for point, objects in evaluations
        ],
    }
    if extra:
        doc.update(extra)
    return doc


def to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def to_csv(doc: dict) -> str:
    """One row per component: ``point, object, component, value``.

    ``component`` joins the coordinate labels of each index with ``|``.
    """
    names = doc["chart"]["coordinates"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["point", "object", "component", "value"])
    for p, ev in enumerate(doc["evaluations"]):
        for obj in sorted(ev["objects"]):
            o = ev["objects"][obj]
            comps = itertools.product(*(range(k) for k in o["shape"]))
            for idx, v in zip(comps, o["data"]):
                w.writerow([p, obj, "|".join(names[i] for i in idx), repr(float(v))])
    return buf.getvalue()


def render(doc: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return to_json(doc)
    if fmt == "csv":
        return to_csv(doc)
    raise ValueError(f"unknown output format {fmt!r}")
