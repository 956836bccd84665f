"""Synthetic benchmark: cube scenes, noise and perturbation injection, metrics.

Scenes place three cameras on a spherical shell looking at a point cloud
drawn uniformly inside a cube at the origin; every accepted point projects
inside the image bounds in all three views.  Experiments grid over noise
levels and calibration methods with per-run seeds derived from
(master_seed, run_index) so results are reproducible run by run.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .calibration import (
    CalibrationConfig,
    calibrate_direct,
    calibrate_msac,
    calibrate_msac_opt,
)
from .errors import CalibrationError, SamplingExhausted
from .estimation import linear_estimate
from .fundamental import calibrate_fundamental, estimate_fundamental, pairs_from_triples
from .geometry import CameraPose, Intrinsics, project, project_points

DEFAULT_K_TRUE = Intrinsics(1000.0, 1000.0, 640.0, 360.0)
DEFAULT_MASTER_SEED = 1234
_MAX_REJECTIONS = 100_000

CSV_HEADER = "seed,n,method,rel_dist_fx,rel_dist_fy,rel_dist_cx,rel_dist_cy,mean_error,converged"


@dataclass(frozen=True)
class SceneConfig:
    """Parameters of one synthetic triplet scene (or a block of them)."""

    num_points: int = 500
    cube_half_extent: float = 1.0
    camera_distance: tuple[float, float] = (3.0, 5.0)
    image_size: tuple[int, int] = (1280, 720)
    K_true: Intrinsics = DEFAULT_K_TRUE
    noise: float = 0.0
    perturbation: float | tuple[float, float] = 0.05
    seed: int = 0
    min_separation_deg: float = 15.0
    num_triplets: int = 1
    outlier_fraction: float = 0.0

    def __post_init__(self):
        if self.num_points < 7:
            raise ValueError("num_points must be >= 7")
        if self.noise < 0:
            raise ValueError("noise amplitude must be >= 0")
        p = self.perturbation
        bounds_ok = (0 <= p < 1) if isinstance(p, (int, float)) else (0 <= p[0] <= p[1] < 1)
        if not bounds_ok:
            raise ValueError(f"perturbation {p} outside the (-1, 1) fraction range")
        if not 0 <= self.outlier_fraction <= 1:
            raise ValueError("outlier_fraction must be in [0, 1]")


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def look_at_pose(center, rng) -> CameraPose:
    """Camera at `center` with +z toward the origin and uniformly random roll."""
    center = np.asarray(center, dtype=float)
    z = -center / np.linalg.norm(center)
    up = np.array([0.0, 0.0, 1.0])
    if abs(z @ up) > 0.99:
        up = np.array([0.0, 1.0, 0.0])
    x0 = np.cross(up, z)
    x0 /= np.linalg.norm(x0)
    y0 = np.cross(z, x0)
    roll = rng.uniform(0.0, 2.0 * np.pi)
    x = np.cos(roll) * x0 + np.sin(roll) * y0
    y = np.cross(z, x)
    R = np.vstack([x, y, z])
    return CameraPose(R, -R @ center)


def _sample_directions(rng, min_separation_deg: float) -> np.ndarray:
    """Three isotropic unit vectors with pairwise angle >= the minimum."""
    cos_max = math.cos(math.radians(min_separation_deg))
    dirs: list[np.ndarray] = []
    attempts = 0
    while len(dirs) < 3:
        attempts += 1
        if attempts > _MAX_REJECTIONS:
            raise SamplingExhausted("could not find camera directions with the requested separation")
        v = rng.standard_normal(3)
        norm = np.linalg.norm(v)
        if norm < 1e-9:
            continue
        v = v / norm
        if all(float(v @ u) <= cos_max for u in dirs):
            dirs.append(v)
    return np.array(dirs)


def generate_scene(cfg: SceneConfig, rng=None):
    """Cube points plus three look-at cameras; every point is visible in all views.

    Returns (points (N, 3), poses tuple of 3 CameraPose, K_true).  Points that
    project outside the image in any view are rejected and redrawn; after
    100000 rejections the configuration is deemed infeasible.
    """
    rng = _as_rng(cfg.seed) if rng is None else rng
    dirs = _sample_directions(rng, cfg.min_separation_deg)
    dists = rng.uniform(cfg.camera_distance[0], cfg.camera_distance[1], size=3)
    poses = tuple(look_at_pose(d * r, rng) for d, r in zip(dirs, dists))

    W, H = cfg.image_size
    half = cfg.cube_half_extent
    points = np.empty((cfg.num_points, 3))
    count = 0
    rejections = 0
    while count < cfg.num_points:
        X = rng.uniform(-half, half, size=3)
        visible = True
        for pose in poses:
            px = project(cfg.K_true, pose, X)
            if not (0.0 <= px[0] < W and 0.0 <= px[1] < H):
                visible = False
                break
        if visible:
            points[count] = X
            count += 1
        else:
            rejections += 1
            if rejections > _MAX_REJECTIONS:
                raise SamplingExhausted(
                    f"{rejections} rejected samples; scene/image configuration infeasible"
                )
    return points, poses, cfg.K_true


def project_triplet(points: np.ndarray, poses, K: Intrinsics) -> np.ndarray:
    """(N, 6) pixel triples of the given 3D points through three cameras."""
    cols = [project_points(K, pose, points) for pose in poses]
    return np.hstack(cols)


def add_pixel_noise(points: np.ndarray, n: float, seed) -> np.ndarray:
    """Add independent Uniform(-n, +n) noise to every coordinate."""
    rng = _as_rng(seed)
    points = np.asarray(points, dtype=float)
    return points + rng.uniform(-n, n, size=points.shape)


def perturb_intrinsics(K_true: Intrinsics, rng_range, seed) -> Intrinsics:
    """Multiply each parameter by (1 + delta).

    `rng_range` is either a fraction f (delta ~ Uniform(-f, f)) or an annulus
    (lo, hi): |delta| ~ Uniform(lo, hi) with an independent random sign.
    """
    rng = _as_rng(seed)
    params = K_true.as_array()
    out = np.empty(4)
    for i in range(4):
        if isinstance(rng_range, (int, float)):
            delta = rng.uniform(-rng_range, rng_range)
        else:
            lo, hi = rng_range
            delta = rng.uniform(lo, hi) * (-1.0 if rng.random() < 0.5 else 1.0)
        out[i] = params[i] * (1.0 + delta)
    return Intrinsics.from_array(out)


def corrupt_third_view(triples: np.ndarray, image_size, rng) -> np.ndarray:
    """Replace every third-view point with a uniform random image position."""
    out = np.array(triples, dtype=float)
    W, H = image_size
    out[:, 4] = rng.uniform(0.0, W, size=len(out))
    out[:, 5] = rng.uniform(0.0, H, size=len(out))
    return out


def mean_relative_error(K_est: Intrinsics, K_true: Intrinsics):
    """Per-parameter |gt - est| / |gt| and their mean, both in percent."""
    gt = K_true.as_array()
    est = K_est.as_array()
    rel = np.abs((gt - est) / gt) * 100.0
    return rel, float(rel.mean())


# --------------------------------------------------------------------------
# experiment grid


@dataclass(frozen=True)
class ExperimentConfig:
    """A noise x method grid of seeded runs sharing one scene template."""

    noise_levels: tuple[float, ...] = (0.1, 0.5, 1.0)
    methods: tuple[str, ...] = ("direct", "fundamental")
    runs: int = 100
    master_seed: int = DEFAULT_MASTER_SEED
    scene: SceneConfig = SceneConfig()
    tau: float = 1e-2
    include_initial: bool = True


@dataclass
class RunRecord:
    """Outcome of one (run, method) cell; failures carry a message and NaNs."""

    run_index: int
    noise: float
    method: str
    K0: Intrinsics
    K_est: Intrinsics | None
    rel_dist: np.ndarray | None
    mean_error: float
    converged: bool
    failure: str = ""


def _prepare_run(scene_cfg: SceneConfig, master_seed: int, run_index: int):
    """Scene blocks, perturbed start and the run rng, all derived from one seed."""
    rng = np.random.default_rng(np.random.SeedSequence((master_seed, run_index)))
    blocks = []
    for _ in range(scene_cfg.num_triplets):
        points, poses, _ = generate_scene(scene_cfg, rng)
        triples = project_triplet(points, poses, scene_cfg.K_true)
        triples = add_pixel_noise(triples, scene_cfg.noise, rng)
        blocks.append(triples)
    n_bad = int(round(scene_cfg.outlier_fraction * len(blocks)))
    if n_bad:
        bad = rng.permutation(len(blocks))[:n_bad]
        for i in bad:
            blocks[i] = corrupt_third_view(blocks[i], scene_cfg.image_size, rng)
    K0 = perturb_intrinsics(scene_cfg.K_true, scene_cfg.perturbation, rng)
    return blocks, K0


def execute_run(
    scene_cfg: SceneConfig,
    master_seed: int,
    run_index: int,
    methods,
    cal_cfg: CalibrationConfig,
) -> list[RunRecord]:
    """All requested methods on one seeded scene draw (shared blocks and K0)."""
    blocks, K0 = _prepare_run(scene_cfg, master_seed, run_index)
    K_true = scene_cfg.K_true

    def record(method, K_est=None, converged=False, failure=""):
        if K_est is None:
            return RunRecord(
                run_index, scene_cfg.noise, method, K0, None, None,
                float("nan"), converged, failure,
            )
        rel, mean = mean_relative_error(K_est, K_true)
        return RunRecord(
            run_index, scene_cfg.noise, method, K0, K_est, rel, mean, converged, failure
        )

    tensor_methods = {"direct", "msac", "msac-opt"}
    tensors = []
    tensors_failure = ""
    if tensor_methods & set(methods):
        # blocks may individually fail (e.g. corrupted third views leave no
        # usable null space); surviving tensors still feed every method
        last_error = ""
        for b in blocks:
            try:
                tensors.append(linear_estimate(b)[0])
            except (CalibrationError, np.linalg.LinAlgError) as exc:
                last_error = str(exc)
        if not tensors:
            tensors_failure = f"tensor estimation failed for all blocks: {last_error}"

    out = []
    for method in methods:
        if method == "initial":
            out.append(record("initial", K0, converged=True))
            continue
        if method in tensor_methods:
            if tensors_failure:
                out.append(record(method, failure=tensors_failure))
                continue
            if method in ("msac", "msac-opt") and len(tensors) < 2:
                out.append(record(method, failure="fewer than 2 usable tensors"))
                continue
            try:
                if method == "direct":
                    rep = calibrate_direct(tensors, K0, cal_cfg)
                elif method == "msac":
                    rep = calibrate_msac(tensors, K0, cal_cfg)
                else:
                    rep = calibrate_msac_opt(tensors, K0, cal_cfg)
                out.append(record(method, rep.K_est, rep.converged))
            except (CalibrationError, np.linalg.LinAlgError) as exc:
                out.append(record(method, failure=str(exc)))
        elif method == "fundamental":
            Fs = []
            for b in blocks:
                for p in pairs_from_triples(b):
                    try:
                        Fs.append(estimate_fundamental(p))
                    except (CalibrationError, np.linalg.LinAlgError):
                        pass
            try:
                rep = calibrate_fundamental(Fs, K0, cal_cfg)
                out.append(record(method, rep.K_est, rep.converged))
            except (CalibrationError, np.linalg.LinAlgError) as exc:
                out.append(record(method, failure=str(exc)))
        else:
            raise ValueError(f"unknown method {method!r}")
    return out


def run_experiment(cfg: ExperimentConfig):
    """Run the full grid; returns (records, summaries keyed by (noise, method))."""
    methods = tuple(cfg.methods)
    if cfg.include_initial and "initial" not in methods:
        methods = ("initial",) + methods
    cal_cfg = CalibrationConfig(tau=cfg.tau)
    records: list[RunRecord] = []
    for noise in cfg.noise_levels:
        scene_cfg = replace(cfg.scene, noise=float(noise))
        for run_index in range(cfg.runs):
            records.extend(
                execute_run(scene_cfg, cfg.master_seed, run_index, methods, cal_cfg)
            )
    return records, summarize(records)


def boxplot_stats(values) -> dict:
    """Median, quartiles, 1.5-IQR whiskers, mean and std of a sample."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        nan = float("nan")
        return {
            "median": nan, "q1": nan, "q3": nan,
            "whisker_lo": nan, "whisker_hi": nan,
            "mean": nan, "std": nan, "iqr": nan,
        }
    q1, med, q3 = np.percentile(v, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    in_lo = v[v >= q1 - 1.5 * iqr]
    in_hi = v[v <= q3 + 1.5 * iqr]
    return {
        "median": float(med),
        "q1": float(q1),
        "q3": float(q3),
        "whisker_lo": float(in_lo.min()) if in_lo.size else float(q1),
        "whisker_hi": float(in_hi.max()) if in_hi.size else float(q3),
        "mean": float(v.mean()),
        "std": float(v.std()),
        "iqr": float(iqr),
    }


def summarize(records) -> dict:
    """Boxplot statistics of mean_error per (noise, method) cell."""
    cells: dict[tuple[float, str], list[RunRecord]] = {}
    for rec in records:
        cells.setdefault((rec.noise, rec.method), []).append(rec)
    out = {}
    for key, recs in cells.items():
        errors = [r.mean_error for r in recs]
        stats = boxplot_stats(errors)
        stats["n"] = len(recs)
        stats["n_failed"] = int(sum(1 for r in recs if not math.isfinite(r.mean_error)))
        out[key] = stats
    return out


def write_runs_csv(records, path) -> None:
    """Per-run flat table, one row per (run, method)."""
    lines = [CSV_HEADER]
    for r in records:
        rel = r.rel_dist if r.rel_dist is not None else [float("nan")] * 4
        lines.append(
            ",".join(
                [
                    str(r.run_index),
                    repr(float(r.noise)),
                    r.method,
                    *(repr(float(v)) for v in rel),
                    repr(float(r.mean_error)),
                    "true" if r.converged else "false",
                ]
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_summary_text(summaries, path) -> None:
    """Key-value summary, one line per (noise, method) cell."""
    keys = ["median", "q1", "q3", "whisker_lo", "whisker_hi", "mean", "std"]
    lines = []
    for (noise, method), stats in sorted(summaries.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        parts = [f"noise={noise!r}", f"method={method}", f"n={stats['n']}", f"n_failed={stats['n_failed']}"]
        parts += [f"{k}={stats[k]!r}" for k in keys]
        lines.append(" ".join(parts))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
