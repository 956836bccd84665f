"""Command-line entry point.

Subcommands: `calibrate` a correspondence file, `synth-bench` the synthetic
experiment grid, `export-sample` a synthetic correspondence file.  All
commands are deterministic; --seed defaults to the documented constant
DEFAULT_MASTER_SEED (never wall clock).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import corrfile
from .backend import BACKEND
from .calibration import (
    CalibrationConfig,
    calibrate_direct,
    calibrate_msac,
    calibrate_msac_opt,
)
from .errors import AllCandidatesFailed, CalibrationError, SchemaError
from .estimation import linear_estimate
from .fundamental import calibrate_fundamental, estimate_fundamental, pairs_from_triples
from .geometry import Intrinsics
from .synthetic import (
    DEFAULT_MASTER_SEED,
    ExperimentConfig,
    SceneConfig,
    _prepare_run,
    mean_relative_error,
    run_experiment,
    write_runs_csv,
    write_summary_text,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_MODEL = 3


def _parse_perturb(text: str):
    """'0.05' -> symmetric fraction; '0.05:0.10' -> signed annulus."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (float(lo), float(hi))
    return float(text)


def _parse_intrinsics_flag(text: str) -> Intrinsics:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"expected fx,fy,cx,cy, got {text!r}")
    return Intrinsics.from_array([float(p) for p in parts])


def _usage_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="triviewcal",
        description="Camera intrinsic self-calibration from image-triplet correspondences.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", help="calibrate intrinsics from a correspondence file")
    c.add_argument("file", help="correspondence file (schema version 1)")
    c.add_argument(
        "--method",
        choices=["direct", "msac", "msac-opt", "fundamental"],
        default="direct",
        help="calibration variant (default: direct)",
    )
    c.add_argument("--tau", type=float, default=1e-2, help="MSAC inlier threshold (default 1e-2)")
    c.add_argument("--init", help="initial intrinsics fx,fy,cx,cy (overrides the file)")
    c.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED, help="unused by this command, accepted for uniformity")
    c.add_argument("--json", action="store_true", help="machine-readable report")
    c.add_argument("--out", help="also write the report to this path")

    b = sub.add_parser("synth-bench", help="run the synthetic noise/method benchmark grid")
    b.add_argument("--runs", type=int, default=100, help="runs per grid cell (default 100)")
    b.add_argument("--noise", default="0.1,0.5,1.0", help="comma-separated noise amplitudes in pixels")
    b.add_argument(
        "--methods",
        default="direct,fundamental",
        help="comma-separated: direct,msac,msac-opt,fundamental",
    )
    b.add_argument("--perturb", default="0.05", help="fraction f, or annulus lo:hi")
    b.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED, help="master seed")
    b.add_argument("--points", type=int, default=500, help="correspondences per triplet")
    b.add_argument("--triplets", type=int, default=1, help="triplet blocks per run")
    b.add_argument("--outlier-fraction", type=float, default=0.0, help="fraction of corrupted blocks")
    b.add_argument("--tau", type=float, default=1e-2)
    b.add_argument("--json", action="store_true", help="also write results.json")
    b.add_argument("--out", default="bench_results", help="output directory")

    e = sub.add_parser("export-sample", help="write a synthetic correspondence file")
    e.add_argument("--out", required=True, help="output file path")
    e.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    e.add_argument("--noise", type=float, default=0.0, help="pixel noise amplitude")
    e.add_argument("--points", type=int, default=500)
    e.add_argument("--triplets", type=int, default=1)
    e.add_argument("--perturb", default="0.05", help="perturbation of the stored initial guess")
    e.add_argument("--outlier-fraction", type=float, default=0.0)
    e.add_argument("--no-gt", action="store_true", help="omit ground-truth intrinsics")
    return p


def _report_dict(rep, data, used, skipped, diags) -> dict:
    out = {
        "method": rep.method,
        "backend": BACKEND,
        "K_est": {
            "fx": rep.K_est.fx,
            "fy": rep.K_est.fy,
            "cx": rep.K_est.cx,
            "cy": rep.K_est.cy,
        },
        "converged": bool(rep.converged),
        "iterations": int(rep.iterations),
        "cost": float(rep.cost),
        "msac_score": float(rep.msac_score),
        "blocks_used": used,
        "blocks_skipped": [{"index": i, "reason": r} for i, r in skipped],
        "diagnostics": [
            {
                "sv_ratio": d.sv_ratio,
                "n_triples": d.n_triples,
                "mean_transfer_error": d.mean_transfer_error,
                "max_transfer_error": d.max_transfer_error,
            }
            for d in diags
        ],
    }
    if rep.selected_index is not None:
        out["selected_block"] = int(rep.selected_index)
        out["candidate_scores"] = [float(s) for s in rep.candidate_scores]
    if data.gt_intrinsics is not None:
        rel, mean = mean_relative_error(rep.K_est, data.gt_intrinsics)
        out["rel_dist_percent"] = {
            "fx": rel[0], "fy": rel[1], "cx": rel[2], "cy": rel[3],
        }
        out["mean_error_percent"] = mean
    return out


def _format_report(rep_dict: dict) -> str:
    k = rep_dict["K_est"]
    lines = [
        f"method: {rep_dict['method']}",
        f"backend: {rep_dict['backend']}",
        f"blocks: {rep_dict['blocks_used']} used, {len(rep_dict['blocks_skipped'])} skipped",
        "K_est: fx={fx:.6f} fy={fy:.6f} cx={cx:.6f} cy={cy:.6f}".format(**k),
        f"converged: {str(rep_dict['converged']).lower()} (iterations={rep_dict['iterations']})",
        f"cost: {rep_dict['cost']:.6e}",
        f"msac_score: {rep_dict['msac_score']:.6f}",
    ]
    if "selected_block" in rep_dict:
        lines.append(f"selected_block: {rep_dict['selected_block']}")
    for blk in rep_dict["blocks_skipped"]:
        lines.append(f"skipped block {blk['index']}: {blk['reason']}")
    if "mean_error_percent" in rep_dict:
        rel = rep_dict["rel_dist_percent"]
        lines.append(
            "rel_dist_percent: fx={fx:.4f} fy={fy:.4f} cx={cx:.4f} cy={cy:.4f}".format(**rel)
        )
        lines.append(f"mean_error_percent: {rep_dict['mean_error_percent']:.4f}")
    if not rep_dict["converged"]:
        lines.append("warning: solver did not reach its tolerances")
    return "\n".join(lines)


def cmd_calibrate(args) -> int:
    try:
        data = corrfile.read_correspondence_file(args.file)
    except SchemaError as exc:
        return _usage_error(str(exc))

    if args.init:
        try:
            K0 = _parse_intrinsics_flag(args.init)
        except (ValueError, CalibrationError) as exc:
            return _usage_error(f"--init: {exc}")
    elif data.init_intrinsics is not None:
        K0 = data.init_intrinsics
    else:
        return _usage_error("$.init_intrinsics: missing field and no --init flag given")

    try:
        cfg = CalibrationConfig(tau=args.tau)
    except ValueError as exc:
        return _usage_error(str(exc))

    if args.method in ("msac", "msac-opt") and len(data.triplets) < 2:
        return _usage_error(f"method {args.method} needs at least 2 triplet blocks")

    skipped: list[tuple[int, str]] = []
    try:
        if args.method == "fundamental":
            Fs = []
            for i, block in enumerate(data.triplets):
                for pairs in pairs_from_triples(block.points):
                    try:
                        Fs.append(estimate_fundamental(pairs))
                    except CalibrationError as exc:
                        skipped.append((i, str(exc)))
            if len(Fs) < 2:
                print("error: fewer than 2 usable view pairs", file=sys.stderr)
                return EXIT_NO_MODEL
            rep = calibrate_fundamental(Fs, K0, cfg)
            used = len(Fs)
            diags = []
        else:
            tensors = []
            diags = []
            pooled = []
            for i, block in enumerate(data.triplets):
                try:
                    T, diag = linear_estimate(block.points)
                    tensors.append(T)
                    diags.append(diag)
                    pooled.append(block.points)
                except CalibrationError as exc:
                    skipped.append((i, str(exc)))
            if not tensors or (args.method != "direct" and len(tensors) < 2):
                print("error: not enough usable triplet blocks", file=sys.stderr)
                return EXIT_NO_MODEL
            triples = np.vstack(pooled)
            if args.method == "direct":
                rep = calibrate_direct(tensors, K0, cfg)
            elif args.method == "msac":
                rep = calibrate_msac(tensors, K0, cfg, triples)
            else:
                rep = calibrate_msac_opt(tensors, K0, cfg, triples)
            used = len(tensors)
    except AllCandidatesFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_MODEL

    rep_dict = _report_dict(rep, data, used, skipped, diags)
    text = json.dumps(rep_dict, indent=1) if args.json else _format_report(rep_dict)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def cmd_synth_bench(args) -> int:
    try:
        noise_levels = tuple(float(v) for v in args.noise.split(","))
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
        valid = {"direct", "msac", "msac-opt", "fundamental", "initial"}
        unknown = set(methods) - valid
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if args.runs < 1:
            raise ValueError("--runs must be >= 1")
        scene = SceneConfig(
            num_points=args.points,
            perturbation=_parse_perturb(args.perturb),
            num_triplets=args.triplets,
            outlier_fraction=args.outlier_fraction,
        )
        cfg = ExperimentConfig(
            noise_levels=noise_levels,
            methods=methods,
            runs=args.runs,
            master_seed=args.seed,
            scene=scene,
            tau=args.tau,
        )
    except ValueError as exc:
        return _usage_error(str(exc))

    records, summaries = run_experiment(cfg)

    os.makedirs(args.out, exist_ok=True)
    runs_path = os.path.join(args.out, "runs.csv")
    summary_path = os.path.join(args.out, "summary.txt")
    write_runs_csv(records, runs_path)
    write_summary_text(summaries, summary_path)
    if args.json:
        doc = {
            "config": {
                "noise_levels": list(noise_levels),
                "methods": list(methods),
                "runs": args.runs,
                "master_seed": args.seed,
                "tau": args.tau,
            },
            "summaries": [
                {"noise": noise, "method": method, **stats}
                for (noise, method), stats in sorted(summaries.items(), key=lambda kv: (kv[0][0], kv[0][1]))
            ],
        }
        with open(os.path.join(args.out, "results.json"), "w") as fh:
            json.dump(doc, fh, indent=1)
    with open(summary_path) as fh:
        sys.stdout.write(fh.read())
    print(f"wrote {runs_path} and {summary_path}")
    return EXIT_OK


def cmd_export_sample(args) -> int:
    try:
        scene = SceneConfig(
            num_points=args.points,
            noise=args.noise,
            perturbation=_parse_perturb(args.perturb),
            num_triplets=args.triplets,
            outlier_fraction=args.outlier_fraction,
        )
    except ValueError as exc:
        return _usage_error(str(exc))

    blocks, K0 = _prepare_run(scene, args.seed, 0)
    data = corrfile.CorrespondenceData(
        image_size=scene.image_size,
        triplets=[
            corrfile.TripletBlock(
                views=(f"block{b}/view1", f"block{b}/view2", f"block{b}/view3"),
                points=block,
            )
            for b, block in enumerate(blocks)
        ],
        gt_intrinsics=None if args.no_gt else scene.K_true,
        init_intrinsics=K0,
    )
    corrfile.write_correspondence_file(args.out, data)
    n = sum(len(b.points) for b in data.triplets)
    print(f"wrote {args.out}: {len(data.triplets)} triplet block(s), {n} triples")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "calibrate":
        return cmd_calibrate(args)
    if args.command == "synth-bench":
        return cmd_synth_bench(args)
    return cmd_export_sample(args)


if __name__ == "__main__":
    sys.exit(main())
