"""Command-line interface: texture reports, sweeps, and reconstruction runs.

Every command writes delimited output plus a rendered figure and a JSON run
manifest. Numeric CSV fields are fixed at 9 significant digits and manifests
carry no timestamps, so identical invocations produce identical bytes. The
manifest records only reproduction-relevant settings; execution details like
the worker count (SOFTGLCM_THREADS or --threads) are deliberately excluded
because they never change the output.

Exit codes: 0 success, 1 input or configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .core import Direction, GrayImage, IntensityConvention, OffsetSpec
from .errors import (
    ContractError,
    InputDomainError,
    NumericalFailureError,
    SoftGlcmError,
)
from .glcm_exact import exact_glcm, symmetrize_glcm
from .glcm_soft import SoftBinningConfig, soft_glcm_forward
from .haralick import FEATURE_NAMES, haralick_features
from .imageio import PatchRef, assemble_patches, extract_patches, load_gray, save_pgm
from .losses import LossWeights, PhaseSchedule
from .masking import ConstantFill, NoiseFill, apply_mask, make_mask
from .recon import (
    ConstantInit,
    NoiseInit,
    ReconConfig,
    VisibleMeanInit,
    reconstruct_patches,
)
from . import report

_DIRECTIONS = {
    "horizontal": Direction.HORIZONTAL_0,
    "vertical": Direction.VERTICAL_90,
    "diag45": Direction.DIAG_45,
    "diag135": Direction.DIAG_135,
}


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    # + 0.0 maps -0.0 to 0.0 so equal values never render differently.
    return f"{float(value) + 0.0:.9g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else _fmt(cell) for cell in row])


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(path: Path, command: str, config: dict, inputs: list, outputs: list) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "inputs": {str(p): f"sha256:{_digest(Path(p))}" for p in inputs},
        "outputs": sorted(outputs),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def parse_offset(text: str) -> OffsetSpec:
    """Parse 'direction[:distance]', e.g. 'horizontal:1' or 'diag45:2'."""
    name, _, dist = text.partition(":")
    key = name.strip().lower()
    if key not in _DIRECTIONS:
        raise InputDomainError(
            f"unknown direction {name!r}; choose from {sorted(_DIRECTIONS)}"
        )
    try:
        distance = int(dist) if dist else 1
    except ValueError:
        raise InputDomainError(f"offset distance {dist!r} is not an integer")
    return OffsetSpec(distance, _DIRECTIONS[key])


def parse_offsets(text: str) -> tuple[OffsetSpec, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise InputDomainError("offset list is empty")
    return tuple(parse_offset(p) for p in parts)


def _parse_weights(text: str) -> LossWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise InputDomainError(f"weights need three comma-separated values, got {text!r}")
    try:
        a, b, c = (float(p) for p in parts)
    except ValueError:
        raise InputDomainError(f"weights {text!r} are not numbers")
    return LossWeights(a, b, c)


def _parse_fill(text: str, default_seed: int):
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "noise":
        return NoiseFill(int(arg) if arg else default_seed)
    if kind == "constant":
        return ConstantFill(float(arg) if arg else 0.0)
    raise InputDomainError(f"unknown fill policy {text!r}; use noise[:seed] or constant[:value]")


def _parse_init(text: str, default_seed: int):
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "noise":
        return NoiseInit(int(arg) if arg else default_seed)
    if kind == "constant":
        return ConstantInit(float(arg) if arg else 0.0)
    if kind in ("visible-mean", "visible_mean"):
        return VisibleMeanInit()
    raise InputDomainError(
        f"unknown init policy {text!r}; use noise[:seed], constant[:value] or visible-mean"
    )


def _default_threads() -> int:
    raw = os.environ.get("SOFTGLCM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputDomainError(f"SOFTGLCM_THREADS={raw!r} is not an integer")
    if n < 1:
        raise InputDomainError(f"SOFTGLCM_THREADS must be >= 1, got {n}")
    return n


def _symmetric_features(img: GrayImage, levels: int, offset: OffsetSpec):
    return haralick_features(symmetrize_glcm(exact_glcm(img, levels, offset)))


def cmd_glcm(args) -> int:
    img = load_gray(args.input)
    offset = parse_offset(args.offset)
    matrix = exact_glcm(img, args.levels, offset, normalized=args.normalize)
    if args.symmetric:
        matrix = symmetrize_glcm(matrix)
    out = Path(args.out)
    header = ["bin"] + [str(i) for i in range(args.levels)]
    rows = [[str(i)] + list(matrix.table[i]) for i in range(args.levels)]
    _write_csv(out, header, rows)
    fig = out.with_suffix(".png")
    report.save_glcm_heatmap(
        matrix.table, fig, f"exact co-occurrence K={args.levels} {args.offset}"
    )
    _write_manifest(
        out.with_suffix(".manifest.json"),
        "glcm",
        {
            "input": args.input,
            "offset": args.offset,
            "levels": args.levels,
            "normalize": args.normalize,
            "symmetric": args.symmetric,
            "out": args.out,
        },
        [args.input],
        [out.name, fig.name],
    )
    return 0


def cmd_sweep(args) -> int:
    try:
        bandwidths = [float(w) for w in args.bandwidths.split(",") if w.strip()]
    except ValueError:
        raise InputDomainError(f"bandwidth list {args.bandwidths!r} has a non-number")
    if not bandwidths:
        raise InputDomainError("bandwidth list is empty")
    if any(w <= 0 for w in bandwidths):
        raise InputDomainError("bandwidths must be positive")

    img = load_gray(args.input)
    offset = parse_offset(args.offset)
    exact = exact_glcm(img, args.levels, offset, normalized=True)
    out = Path(args.out)
    outputs = [out.name]
    rows = []
    for w in bandwidths:
        soft = soft_glcm_forward(img.pixels, SoftBinningConfig(args.levels, w), offset)
        dist = float(np.linalg.norm(soft.table - exact.table))
        rows.append((w, dist, soft.total_mass))
        matrix_path = out.with_name(f"{out.stem}_w{w:g}.csv")
        header = ["bin"] + [str(i) for i in range(args.levels)]
        _write_csv(
            matrix_path,
            header,
            [[str(i)] + list(soft.table[i]) for i in range(args.levels)],
        )
        outputs.append(matrix_path.name)
    _write_csv(out, ["steepness", "frobenius_distance_to_exact", "mass"], rows)
    fig = out.with_suffix(".png")
    report.save_sweep_curve(rows, fig)
    outputs.append(fig.name)
    _write_manifest(
        out.with_suffix(".manifest.json"),
        "sweep",
        {
            "input": args.input,
            "bandwidths": bandwidths,
            "levels": args.levels,
            "offset": args.offset,
            "out": args.out,
        },
        [args.input],
        outputs,
    )
    return 0


def cmd_haralick(args) -> int:
    root = Path(args.input)
    if root.is_dir():
        files = sorted(p for p in root.iterdir() if p.is_file())
        if not files:
            raise InputDomainError(f"{root} contains no files")
    else:
        files = [root]
    offset = parse_offset(args.offset)

    def one(path: Path):
        try:
            return path.name, _symmetric_features(load_gray(path), args.levels, offset), None
        except (SoftGlcmError, OSError) as exc:
            return path.name, None, str(exc)

    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        results = list(pool.map(one, files))

    rows = []
    columns: dict[str, dict[str, float]] = {}
    for name, feats, error in results:
        if feats is None:
            print(f"warning: skipping {name}: {error}", file=sys.stderr)
            continue
        rows.append([name] + [feats.as_dict()[f] for f in FEATURE_NAMES])
        columns[name] = feats.as_dict()
    if not rows:
        raise InputDomainError("no readable images")
    if args.mean:
        values = np.array([r[1:] for r in rows], dtype=np.float64)
        mean = values.mean(axis=0)
        rows.append(["mean"] + list(mean))
        columns["mean"] = dict(zip(FEATURE_NAMES, (float(v) for v in mean)))

    out = Path(args.out)
    _write_csv(out, ["image"] + list(FEATURE_NAMES), rows)
    fig = out.with_suffix(".png")
    report.save_feature_bars(columns, fig)
    _write_manifest(
        out.with_suffix(".manifest.json"),
        "haralick",
        {
            "input": args.input,
            "offset": args.offset,
            "levels": args.levels,
            "mean": args.mean,
            "out": args.out,
        },
        [str(f) for f in files],
        [out.name, fig.name],
    )
    return 0


def _comparison_rows(original: GrayImage, recon: GrayImage, levels, offsets):
    rows = []
    orig = np.zeros(len(FEATURE_NAMES))
    rec = np.zeros(len(FEATURE_NAMES))
    for off in offsets:
        orig += _symmetric_features(original, levels, off).as_array() / len(offsets)
        rec += _symmetric_features(recon, levels, off).as_array() / len(offsets)
    for i, name in enumerate(FEATURE_NAMES):
        diff = abs(orig[i] - rec[i])
        rows.append((name, orig[i], rec[i], diff, diff / max(abs(orig[i]), 1e-12)))
    return rows, dict(zip(FEATURE_NAMES, orig)), dict(zip(FEATURE_NAMES, rec))


def cmd_reconstruct(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    img = load_gray(args.input)
    patches, grid = extract_patches(img, args.patch_size)
    plan = make_mask(grid, args.mask_ratio, args.seed)
    fill = _parse_fill(args.fill, args.seed + 1)
    init = _parse_init(args.init, args.seed + 2)
    visible, targets, corrupted = apply_mask(img, plan, fill)
    visible_mean = float(np.mean([p.pixels.mean() for p in visible]))
    offsets = parse_offsets(args.offsets)

    if args.weights is not None:
        schedule = PhaseSchedule(warmup_steps=0, main=_parse_weights(args.weights))
    else:
        schedule = PhaseSchedule(warmup_steps=args.schedule)

    if args.steps > 0:
        cfg = ReconConfig(
            step_size=args.step_size,
            max_steps=args.steps,
            schedule=schedule,
            offsets=offsets,
            binning=SoftBinningConfig(args.levels, args.bandwidth),
            init=init,
        )
        finals, trace = reconstruct_patches(
            targets, cfg, visible_mean=visible_mean, threads=args.threads
        )
        trace_rows = trace.rows()
    else:
        finals = [t.pixels for t in _masked_corrupted_patches(corrupted, plan)]
        trace_rows = []

    recon_patches = list(visible) + [
        PatchRef(t.grid_row, t.grid_col, t.patch_size, np.clip(f, -1.0, 1.0))
        for t, f in zip(targets, finals)
    ]
    recon_img = assemble_patches(recon_patches, grid)

    save_pgm(corrupted, out_dir / "corrupted.pgm")
    save_pgm(recon_img, out_dir / "reconstruction.pgm")
    (out_dir / "mask.json").write_text(
        json.dumps(plan.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _write_csv(
        out_dir / "trace.csv",
        ["step", "weight_mse", "weight_glcm", "weight_ssim", "total", "mse", "glcm", "ssim"],
        [
            [r["step"], r["weight_mse"], r["weight_glcm"], r["weight_ssim"],
             r["total"], r["mse"], r["glcm"], r["ssim"]]
            for r in trace_rows
        ],
    )
    comp_rows, orig_cols, rec_cols = _comparison_rows(img, recon_img, args.levels, offsets)
    _write_csv(
        out_dir / "comparison.csv",
        ["feature", "original", "reconstruction", "absolute_difference", "relative_difference"],
        comp_rows,
    )
    report.save_trace_curves(trace_rows, out_dir / "trace.png")
    report.save_feature_bars(
        {"original": orig_cols, "reconstruction": rec_cols}, out_dir / "comparison.png"
    )
    _write_manifest(
        out_dir / "manifest.json",
        "reconstruct",
        {
            "input": args.input,
            "patch_size": args.patch_size,
            "mask_ratio": args.mask_ratio,
            "seed": args.seed,
            "fill": args.fill,
            "init": args.init,
            "steps": args.steps,
            "step_size": args.step_size,
            "weights": args.weights,
            "schedule": args.schedule,
            "levels": args.levels,
            "bandwidth": args.bandwidth,
            "offsets": args.offsets,
            "out_dir": args.out_dir,
        },
        [args.input],
        [
            "corrupted.pgm", "reconstruction.pgm", "mask.json", "trace.csv",
            "trace.png", "comparison.csv", "comparison.png",
        ],
    )
    return 0


def _masked_corrupted_patches(corrupted: GrayImage, plan):
    patches, _ = extract_patches(corrupted, plan.grid.patch_size)
    return [p for p in patches if (p.grid_row, p.grid_col) in plan.masked]


def cmd_compare(args) -> int:
    original = load_gray(args.original)
    rec_a = load_gray(args.reconstruction_a)
    rec_b = load_gray(args.reconstruction_b)
    if not (original.shape == rec_a.shape == rec_b.shape):
        raise ContractError(
            f"shape mismatch: original {original.shape}, "
            f"A {rec_a.shape}, B {rec_b.shape}"
        )
    offset = parse_offset(args.offset)
    labels = ("original", "reconstruction_a", "reconstruction_b")
    images = dict(zip(labels, (original, rec_a, rec_b)))
    features = {
        label: _symmetric_features(im, args.levels, offset).as_dict()
        for label, im in images.items()
    }
    conv = IntensityConvention(256)
    hists = {
        label: np.bincount(conv.to_raw(im.pixels).ravel(), minlength=256)
        for label, im in images.items()
    }

    rows = [
        [name] + [features[label][name] for label in labels] for name in FEATURE_NAMES
    ]
    rows += [
        [f"hist_{level:03d}"] + [int(hists[label][level]) for label in labels]
        for level in range(256)
    ]
    out = Path(args.out)
    _write_csv(out, ["metric", *labels], rows)
    fig_feat = out.with_name(f"{out.stem}_features.png")
    fig_hist = out.with_name(f"{out.stem}_histograms.png")
    report.save_feature_bars(features, fig_feat)
    report.save_histogram_overlay(hists, fig_hist)
    _write_manifest(
        out.with_suffix(".manifest.json"),
        "compare",
        {
            "original": args.original,
            "reconstruction_a": args.reconstruction_a,
            "reconstruction_b": args.reconstruction_b,
            "offset": args.offset,
            "levels": args.levels,
            "out": args.out,
        },
        [args.original, args.reconstruction_a, args.reconstruction_b],
        [out.name, fig_feat.name, fig_hist.name],
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softglcm",
        description="Differentiable co-occurrence texture statistics and reconstruction runs",
    )
    parser.add_argument("--version", action="version", version=f"softglcm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("glcm", help="exact co-occurrence matrix of one image")
    p.add_argument("input", help="PGM or grayscale PNG image")
    p.add_argument("--offset", default="horizontal:1", help="direction:distance (default %(default)s)")
    p.add_argument("--levels", type=int, default=64, help="gray levels K (default %(default)s)")
    p.add_argument("--normalize", action="store_true", help="divide counts by the pair total")
    p.add_argument("--symmetric", action="store_true", help="average the matrix with its transpose")
    p.add_argument("--out", required=True, help="output CSV path; heatmap PNG lands beside it")
    p.set_defaults(func=cmd_glcm)

    p = sub.add_parser("sweep", help="soft-vs-exact distance across steepness values")
    p.add_argument("input", help="PGM or grayscale PNG image")
    p.add_argument("--bandwidths", default="5,15,30", help="comma list of W values (default %(default)s)")
    p.add_argument("--levels", type=int, default=64, help="gray levels K (default %(default)s)")
    p.add_argument("--offset", default="horizontal:1", help="direction:distance (default %(default)s)")
    p.add_argument("--out", required=True, help="summary CSV path; per-W matrices and curve PNG land beside it")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("haralick", help="texture features for an image or directory")
    p.add_argument("input", help="image file, or directory of images")
    p.add_argument("--offset", default="horizontal:1", help="direction:distance (default %(default)s)")
    p.add_argument("--levels", type=int, default=64, help="gray levels K (default %(default)s)")
    p.add_argument("--mean", action="store_true", help="append a mean row over all images")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default $SOFTGLCM_THREADS or 1)")
    p.add_argument("--out", required=True, help="output CSV path; feature-bar PNG lands beside it")
    p.set_defaults(func=cmd_haralick)

    p = sub.add_parser("reconstruct", help="mask an image and reconstruct by descent")
    p.add_argument("input", help="PGM or grayscale PNG image")
    p.add_argument("--patch-size", type=int, default=16, help="square patch side (default %(default)s)")
    p.add_argument("--mask-ratio", type=float, default=0.75, help="fraction of patches masked (default %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="mask-selection seed (default %(default)s)")
    p.add_argument("--fill", default="noise", help="masked-region fill: noise[:seed], constant[:value], or visible-mean")
    p.add_argument("--init", default="noise", help="descent start: noise[:seed], constant[:value], or visible-mean")
    p.add_argument("--steps", type=int, default=2000, help="maximum descent steps (default %(default)s)")
    p.add_argument("--step-size", type=float, default=0.05, help="descent step size (default %(default)s)")
    p.add_argument("--weights", default=None, help="fixed mse,glcm,ssim weights (mutually exclusive with --schedule)")
    p.add_argument("--schedule", type=int, default=400, help="warmup steps before full weights (default %(default)s)")
    p.add_argument("--levels", type=int, default=64, help="soft-binning levels K (default %(default)s)")
    p.add_argument("--bandwidth", type=float, default=30.0, help="soft-binning steepness W (default %(default)s)")
    p.add_argument("--offsets", default="horizontal:1,vertical:1", help="comma list of direction:distance pairs")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default $SOFTGLCM_THREADS or 1)")
    p.add_argument("--out-dir", required=True, help="directory for all run artifacts")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("compare", help="feature and histogram table for two reconstructions")
    p.add_argument("original", help="reference image")
    p.add_argument("reconstruction_a", help="first reconstruction")
    p.add_argument("reconstruction_b", help="second reconstruction")
    p.add_argument("--offset", default="horizontal:1", help="direction:distance (default %(default)s)")
    p.add_argument("--levels", type=int, default=64, help="gray levels K (default %(default)s)")
    p.add_argument("--out", required=True, help="output CSV path; bar and histogram PNGs land beside it")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    try:
        if getattr(args, "threads", None) is None and hasattr(args, "threads"):
            args.threads = _default_threads()
        if getattr(args, "threads", 1) < 1:
            raise InputDomainError(f"threads must be >= 1, got {args.threads}")
        if getattr(args, "steps", 0) < 0:
            raise InputDomainError(f"steps must be >= 0, got {args.steps}")
        return args.func(args)
    except NumericalFailureError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (SoftGlcmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
