"""Command-line interface.

Machine-readable outputs go to the files named with ``-o``; a short human
summary goes to standard output. Exit codes are uniform across subcommands:

* 0 - success (for ``check-mio``: the joint IS an epsilon-MIO)
* 1 - negative verdict (``check-mio`` false, or an operation that requires
      an MIO refused a non-MIO input)
* 2 - input error (missing/malformed files, violated invariants, bad flags)
* 3 - internal-consistency failure (independent computation paths disagreed)

Identical invocations, including seeds, produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import serialization as sio
from .decoding import (boundary_search_1d, decoder_accuracy,
                       decoder_information, map_decoder, project_axis,
                       segment_decoder)
from .errors import InternalConsistencyError, InvariantError, NotMioError
from .measures import info_report
from .mio import (DEFAULT_MIO_TOL, check_mio, identification_function,
                  model_distributions, support_regions)
from .partitions import coarse_grain_target, join_partitions
from .simulate import ExperimentConfig, categoricality_index, run_experiment
from .tables import Axis, ObservableGrid, estimate_joint


def _bits(nats):
    return nats / math.log(2.0)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="miokit",
        description="Information measures and maximally informative observables "
                    "over finite discrete grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        return p

    p = add("info", "entropy / mutual-information report for a joint table")
    p.add_argument("joint", help="joint table JSON")
    p.add_argument("-o", "--output", required=True, help="report JSON to write")

    p = add("check-mio", "decide whether the observable is an epsilon-MIO")
    p.add_argument("joint")
    p.add_argument("--tol", type=float, default=DEFAULT_MIO_TOL,
                   help="verdict tolerance in nats (default 1e-9)")
    p.add_argument("-o", "--output", required=True, help="verdict JSON to write")

    p = add("models", "per-category model distributions of an MIO")
    p.add_argument("joint")
    p.add_argument("-o", "--output", required=True)

    p = add("regions", "per-category support regions of an MIO")
    p.add_argument("joint")
    p.add_argument("--floor", type=float, default=0.0,
                   help="cells with mass <= floor go to 'uncovered' (default 0)")
    p.add_argument("-o", "--output", required=True)

    p = add("coarsen", "merge categories into partition blocks")
    p.add_argument("joint")
    p.add_argument("--blocks", required=True, help="partition JSON")
    p.add_argument("-o", "--output", required=True, help="coarse joint JSON to write")

    p = add("join", "meet (common refinement) of two or more partitions")
    p.add_argument("partitions", nargs="+", help="partition JSON files")
    p.add_argument("-o", "--output", required=True)

    p = add("decode", "MAP decoder with accuracy and achieved information")
    p.add_argument("joint")
    p.add_argument("-o", "--output", required=True)

    p = add("boundaries", "optimal category boundaries on a 1-D grid")
    p.add_argument("joint")
    p.add_argument("--max-cuts", type=int, default=None,
                   help="cut budget (default: number of categories - 1)")
    p.add_argument("-o", "--output", required=True)

    p = add("project", "collapse a multi-axis grid onto one axis")
    p.add_argument("joint")
    p.add_argument("--axis", type=int, required=True, help="axis index to keep")
    p.add_argument("-o", "--output", required=True)

    p = add("estimate", "relative-frequency joint table from a sample CSV")
    p.add_argument("samples", help="CSV with header category,x1,...,xd")
    p.add_argument("--bins", type=int, default=10,
                   help="cells per axis, spanning the sample range (default 10)")
    p.add_argument("-o", "--output", required=True)

    p = add("simulate", "run a synthetic categorical-perception experiment")
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--samples", type=int, default=None,
                   help="override the config sample count")
    p.add_argument("-o", "--output", required=True, help="result directory")

    p = add("ident", "identification function as a plot-ready CSV")
    p.add_argument("joint")
    p.add_argument("--threshold", type=float, default=0.95,
                   help="confidence threshold for the categoricality index")
    p.add_argument("-o", "--output", required=True)

    return parser


def _cmd_info(args):
    report = info_report(sio.load_joint(args.joint))
    sio.dump_json(report.to_dict(), args.output)
    print(f"i_mutual = {report.i_mutual:.9g} nats ({_bits(report.i_mutual):.9g} bits)")
    print(f"i_max = {report.i_max:.9g} nats; informativeness = {report.informativeness:.6f}")
    return 0


def _cmd_check_mio(args):
    verdict = check_mio(sio.load_joint(args.joint), args.tol)
    sio.dump_json(verdict.to_dict(), args.output)
    state = "MIO" if verdict.is_mio else "not an MIO"
    print(f"{state}: epsilon = {verdict.epsilon:.6g} nats at tolerance "
          f"{verdict.tolerance_used:g} (worst cell {verdict.worst_cell})")
    return 0 if verdict.is_mio else 1


def _cmd_models(args):
    joint = sio.load_joint(args.joint)
    models = model_distributions(joint)
    sio.dump_json({
        "categories": list(joint.categories.labels),
        "models": {lab: dist.mass.tolist() for lab, dist in models.items()},
    }, args.output)
    print(f"wrote {len(models)} model distributions")
    return 0


def _cmd_regions(args):
    joint = sio.load_joint(args.joint)
    regions = support_regions(joint, mass_floor=args.floor)
    sio.dump_json(regions.to_dict(), args.output)
    sizes = ", ".join(f"{lab}:{len(cells)}" for lab, cells in regions.regions.items())
    print(f"region sizes {sizes}; {len(regions.uncovered)} uncovered cells")
    return 0


def _cmd_coarsen(args):
    joint = sio.load_joint(args.joint)
    partition = sio.load_partition(args.blocks, space=joint.categories)
    coarse = coarse_grain_target(joint, partition)
    sio.save_joint(coarse, args.output)
    print(f"coarsened {joint.n_categories} categories into {coarse.n_categories} blocks")
    return 0


def _cmd_join(args):
    if len(args.partitions) < 2:
        raise InvariantError("join needs at least two partition files")
    parts = [sio.load_partition(path) for path in args.partitions]
    meet = parts[0]
    for part in parts[1:]:
        meet = join_partitions(meet, part)
    sio.save_partition(meet, args.output)
    print(f"meet has {meet.n_blocks} blocks"
          + ("; discrete" if meet.is_discrete() else ""))
    return 0


def _cmd_decode(args):
    joint = sio.load_joint(args.joint)
    decoder = map_decoder(joint)
    accuracy = decoder_accuracy(joint, decoder)
    information = decoder_information(joint, decoder)
    out = decoder.to_dict()
    out["accuracy"] = accuracy
    out["information"] = information
    sio.dump_json(out, args.output)
    print(f"MAP accuracy = {accuracy:.6f}; achieved information = {information:.9g} nats")
    return 0


def _cmd_boundaries(args):
    joint = sio.load_joint(args.joint)
    max_cuts = args.max_cuts
    if max_cuts is None:
        max_cuts = joint.n_categories - 1
    bounds = boundary_search_1d(joint, max_cuts)
    sio.dump_json(bounds.to_dict(), args.output)
    decoder = segment_decoder(joint, bounds)
    info = decoder_information(joint, decoder)
    print(f"{len(bounds.cuts)} cuts at {list(bounds.cuts)}; "
          f"segment information = {info:.9g} nats")
    return 0


def _cmd_project(args):
    joint = sio.load_joint(args.joint)
    sio.save_joint(project_axis(joint, args.axis), args.output)
    print(f"kept axis {args.axis} ({joint.grid.axes[args.axis].name})")
    return 0


def _cmd_estimate(args):
    samples, axis_names = sio.load_samples_csv(args.samples)
    if args.bins < 1:
        raise InvariantError(f"--bins must be >= 1 (got {args.bins})")
    coords = np.array([rec[1] for rec in samples.records])
    axes = []
    for d, name in enumerate(axis_names):
        lo, hi = float(coords[:, d].min()), float(coords[:, d].max())
        if lo == hi:
            axes.append(Axis(name, [lo]))
        else:
            axes.append(Axis(name, np.linspace(lo, hi, args.bins)))
    grid = ObservableGrid(axes)
    sio.save_joint(estimate_joint(samples, grid), args.output)
    print(f"estimated a {samples.categories.size}x{grid.size} table "
          f"from {len(samples)} samples")
    return 0


def _cmd_simulate(args):
    config = sio.load_config(args.config)
    if args.seed is not None or args.samples is not None:
        config = ExperimentConfig(
            categories=config.categories,
            prior=config.prior,
            grid=config.grid,
            models=config.models,
            sample_count=args.samples if args.samples is not None else config.sample_count,
            seed=args.seed if args.seed is not None else config.seed,
        )
    result = run_experiment(config)
    sio.write_experiment_dir(result, args.output)
    print(f"true informativeness = {result.true_report.informativeness:.6f}; "
          f"estimated = {result.estimated_report.informativeness:.6f}")
    print(f"wrote results under {args.output}")
    return 0


def _cmd_ident(args):
    joint = sio.load_joint(args.joint)
    ident = identification_function(joint)
    index = categoricality_index(ident, args.threshold)
    sio.save_identification_csv(ident, args.output)
    print(f"categoricality index at threshold {args.threshold:g}: {index:.6f}")
    return 0


_HANDLERS = {
    "info": _cmd_info,
    "check-mio": _cmd_check_mio,
    "models": _cmd_models,
    "regions": _cmd_regions,
    "coarsen": _cmd_coarsen,
    "join": _cmd_join,
    "decode": _cmd_decode,
    "boundaries": _cmd_boundaries,
    "project": _cmd_project,
    "estimate": _cmd_estimate,
    "simulate": _cmd_simulate,
    "ident": _cmd_ident,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except NotMioError as exc:
        print(f"negative verdict: {exc}", file=sys.stderr)
        return 1
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 3
    except (InvariantError, OSError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
