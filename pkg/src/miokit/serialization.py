"""File formats: JSON and CSV readers/writers for every wire object.

All floating-point output is rendered with 17 significant digits so values
round-trip exactly, and writers are fully deterministic: the same object
always produces the same bytes. Loaders validate eagerly and raise
:class:`InvariantError` messages naming the violated invariant.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .errors import InvariantError
from .simulate import CategoryModel, ExperimentConfig, categoricality_index
from .tables import (Axis, CategorySpace, JointTable, ObservableGrid,
                     SampleSet)

FLOAT_DIGITS = ".17g"


def format_float(value):
    value = float(value)
    if not math.isfinite(value):
        raise InvariantError("cannot serialize a non-finite number")
    return format(value, FLOAT_DIGITS)


def dumps(obj):
    """Deterministic JSON text with 17-significant-digit floats."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = obj.tolist() if isinstance(obj, np.ndarray) else obj
        return "[" + ", ".join(dumps(v) for v in items) + "]"
    if isinstance(obj, dict):
        parts = []
        for key, value in obj.items():
            if not isinstance(key, str):
                raise InvariantError("JSON object keys must be strings")
            parts.append(f"{json.dumps(key)}: {dumps(value)}")
        return "{" + ", ".join(parts) + "}"
    raise InvariantError(f"cannot serialize object of type {type(obj).__name__}")


def dump_json(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvariantError(f"{path}: not valid JSON ({exc})") from None


def _require(mapping, key, context):
    if not isinstance(mapping, dict) or key not in mapping:
        raise InvariantError(f"{context}: missing required key {key!r}")
    return mapping[key]


# ---------------------------------------------------------------------------
# joint tables
# ---------------------------------------------------------------------------

def grid_from_dict(d, context="grid"):
    axes_spec = _require(d, "axes", context)
    if not isinstance(axes_spec, list) or not axes_spec:
        raise InvariantError(f"{context}: 'axes' must be a non-empty list")
    axes = []
    for spec in axes_spec:
        name = _require(spec, "name", context)
        if "cells" in spec:
            cells = spec["cells"]
        elif {"start", "stop", "count"} <= set(spec):
            count = int(spec["count"])
            if count < 1:
                raise InvariantError(f"{context}: axis {name!r} count must be >= 1")
            cells = np.linspace(float(spec["start"]), float(spec["stop"]), count)
        else:
            raise InvariantError(
                f"{context}: axis {name!r} needs 'cells' or 'start'/'stop'/'count'")
        axes.append(Axis(name, cells))
    return ObservableGrid(axes)


def grid_to_dict(grid):
    return {"axes": [{"name": a.name, "cells": a.cells.tolist()} for a in grid.axes]}


def joint_from_dict(d, context="joint table"):
    categories = CategorySpace(_require(d, "categories", context))
    grid = grid_from_dict(_require(d, "grid", context), context)
    p = _require(d, "p", context)
    return JointTable(categories, grid, np.asarray(p, dtype=np.float64))


def joint_to_dict(joint):
    return {
        "categories": list(joint.categories.labels),
        "grid": grid_to_dict(joint.grid),
        "p": joint.p.ravel().tolist(),
    }


def load_joint(path):
    return joint_from_dict(load_json(path), context=str(path))


def save_joint(joint, path):
    dump_json(joint_to_dict(joint), path)


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def partition_from_dict(d, space=None, context="partition"):
    """Build a partition; without an explicit category space the labels are
    collected from the blocks and ordered lexicographically (deterministic
    regardless of block order)."""
    from .partitions import CategoryPartition

    blocks = _require(d, "blocks", context)
    if not isinstance(blocks, list):
        raise InvariantError(f"{context}: 'blocks' must be a list of label lists")
    if space is None:
        labels = sorted({str(lab) for block in blocks for lab in block})
        space = CategorySpace(labels)
    return CategoryPartition(space, blocks)


def partition_to_dict(partition):
    return {"blocks": [list(block) for block in partition.blocks]}


def load_partition(path, space=None):
    return partition_from_dict(load_json(path), space=space, context=str(path))


def save_partition(partition, path):
    dump_json(partition_to_dict(partition), path)


# ---------------------------------------------------------------------------
# sample CSV
# ---------------------------------------------------------------------------

def save_samples_csv(samples, path, axis_names=None):
    dim = samples.dimension
    if axis_names is None:
        axis_names = [f"x{i + 1}" for i in range(dim)]
    if len(axis_names) != dim:
        raise InvariantError("need one axis name per coordinate")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("category," + ",".join(axis_names) + "\n")
        for label, coords in samples:
            fh.write(label + "," + ",".join(format_float(x) for x in coords) + "\n")


def load_samples_csv(path, categories=None):
    """Read a sample CSV; returns ``(SampleSet, axis_names)``.

    Without an explicit category space, labels are collected from the file
    and ordered lexicographically.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise InvariantError(f"{path}: empty sample file")
    header = lines[0].split(",")
    if header[0] != "category" or len(header) < 2:
        raise InvariantError(
            f"{path}: header must be 'category,x1,...,xd' (got {lines[0]!r})")
    axis_names = header[1:]
    dim = len(axis_names)
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != dim + 1:
            raise InvariantError(
                f"{path}:{lineno}: expected {dim + 1} fields, got {len(parts)}")
        try:
            coords = tuple(float(x) for x in parts[1:])
        except ValueError:
            raise InvariantError(f"{path}:{lineno}: malformed coordinate") from None
        records.append((parts[0], coords))
    if not records:
        raise InvariantError(f"{path}: no sample records")
    if categories is None:
        categories = CategorySpace(sorted({label for label, _ in records}))
    return SampleSet(categories, records), axis_names


# ---------------------------------------------------------------------------
# identification CSV
# ---------------------------------------------------------------------------

def save_identification_csv(ident, path):
    """Plot-ready table: cell coordinates, cell mass, then one conditional
    column per category (blank where the conditional is undefined)."""
    grid = ident.grid
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = [a.name for a in grid.axes] + ["p_omega"] + list(ident.categories.labels)
        fh.write(",".join(header) + "\n")
        coords = grid.coords_matrix()
        for k in range(grid.size):
            row = [format_float(x) for x in coords[k]]
            row.append(format_float(ident.cell_mass[k]))
            if ident.cell_mass[k] > 0.0:
                row.extend(format_float(v) for v in ident.probs[:, k])
            else:
                row.extend("" for _ in ident.categories.labels)
            fh.write(",".join(row) + "\n")


# ---------------------------------------------------------------------------
# experiment configs and result directories
# ---------------------------------------------------------------------------

def config_from_dict(d, context="experiment config"):
    categories = CategorySpace(_require(d, "categories", context))
    prior = _require(d, "prior", context)
    grid = grid_from_dict(_require(d, "grid", context), context)
    models_spec = _require(d, "models", context)
    models = {}
    for label, spec in models_spec.items():
        center = _require(spec, "center", f"{context}: model {label!r}")
        width = _require(spec, "width", f"{context}: model {label!r}")
        if np.isscalar(width):
            width = [width] * grid.ndim
        models[label] = CategoryModel(tuple(center), tuple(width))
    return ExperimentConfig(
        categories=categories,
        prior=prior,
        grid=grid,
        models=models,
        sample_count=_require(d, "sample_count", context),
        seed=_require(d, "seed", context),
    )


def config_to_dict(config):
    return {
        "categories": list(config.categories.labels),
        "prior": config.prior.mass.tolist(),
        "grid": grid_to_dict(config.grid),
        "models": {
            label: {"center": list(m.center), "width": list(m.width)}
            for label, m in config.models.items()
        },
        "sample_count": config.sample_count,
        "seed": config.seed,
    }


def load_config(path):
    return config_from_dict(load_json(path), context=str(path))


def save_config(config, path):
    dump_json(config_to_dict(config), path)


CATEGORICALITY_THRESHOLD = 0.95


def write_experiment_dir(result, outdir):
    """Materialize an ExperimentResult as its five-file directory."""
    os.makedirs(outdir, exist_ok=True)
    save_joint(result.true_joint, os.path.join(outdir, "true_joint.json"))
    save_joint(result.estimated_joint, os.path.join(outdir, "estimated_joint.json"))
    save_identification_csv(result.identification,
                            os.path.join(outdir, "identification.csv"))
    report = {
        "true": result.true_report.to_dict(),
        "estimated": result.estimated_report.to_dict(),
        "true_verdict": result.true_verdict.to_dict(),
        "estimated_verdict": result.estimated_verdict.to_dict(),
        "categoricality_threshold": CATEGORICALITY_THRESHOLD,
        "categoricality_index": categoricality_index(result.identification,
                                                     CATEGORICALITY_THRESHOLD),
        "seed": result.config.seed,
        "sample_count": result.config.sample_count,
        "prng": result.prng,
    }
    dump_json(report, os.path.join(outdir, "report.json"))
    if result.boundaries is not None:
        dump_json(result.boundaries.to_dict(), os.path.join(outdir, "boundaries.json"))
