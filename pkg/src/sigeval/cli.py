"""Command-line entry point: ``sigeval <command> ...``.

Exit codes: 0 on success, 1 when frames or inputs fail to parse, 2 on
configuration errors (bad config, camera spec or singular homography).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .attention import (DISK, GAUSSIAN, AttentionMap, accumulate_gaze, attention_radius,
                        corner_homography, gaze_metrics, project_attention, CameraSpec)
from .bench import DEFAULT_COUNTS, format_table, run_bench, slopes
from .config import load_config
from .errors import (ConfigError, DegenerateConfigurationError, InvalidSpecError, SigEvalError,
                     SingularHomographyError, TooFewPointsError)
from .evaluate import CorpusJob, evaluate_corpus, report_json, summary_rows
from .io import read_gaze_csv, read_homography_config, read_map, write_map
from .scene import load_sig
from .srd import derive_srp

log = logging.getLogger("sigeval")

EXIT_OK = 0
EXIT_FRAMES = 1
EXIT_CONFIG = 2

_CONFIG_ERRORS = (ConfigError, InvalidSpecError, SingularHomographyError,
                  DegenerateConfigurationError, TooFewPointsError)


def parse_counts(text: str) -> list[int]:
    """Comma list of counts; ``3,5,...,22`` continues the first step up to the last value."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if "..." not in parts:
        return [int(p) for p in parts]
    k = parts.index("...")
    head = [int(p) for p in parts[:k]]
    tail = [int(p) for p in parts[k + 1:]]
    if len(head) < 2 or len(tail) != 1:
        raise argparse.ArgumentTypeError("use the form a,b,...,z")
    step = head[1] - head[0]
    if step <= 0:
        raise argparse.ArgumentTypeError("counts must increase")
    out = list(head)
    while out[-1] + step < tail[0]:
        out.append(out[-1] + step)
    if out[-1] != tail[0]:
        out.append(tail[0])
    return out


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    if args.jobs is not None:
        cfg = replace(cfg, jobs=args.jobs)
    if args.human_like and args.attention_dir is None:
        raise ConfigError("--human-like needs --attention-dir")
    job = CorpusJob(
        pred_dir=Path(args.pred), gt_dir=Path(args.gt), cfg=cfg,
        srp_dir=Path(args.srp_answers) if args.srp_answers else None,
        template_dir=Path(args.templates) if args.templates else None,
        attention_dir=Path(args.attention_dir) if args.attention_dir else None,
        human_like=args.human_like, per_frame=args.per_frame,
    )
    for d in (job.pred_dir, job.gt_dir):
        if not d.is_dir():
            raise ConfigError(f"{d} is not a directory")
    res = evaluate_corpus(job)
    # the job count is an execution detail; keep it out of the report so
    # output bytes do not depend on it
    res.report["config"]["jobs"] = 1
    out = Path(args.out)
    out.write_text(report_json(res.report), encoding="utf-8")
    header, rows = summary_rows(res.frames, res.report["aggregate"])
    _write_csv(out.with_suffix(".csv"), header, rows)
    if args.plot:
        from .plotting import plot_aggregate
        plot_aggregate(res.report["aggregate"], out.with_suffix(".png"))
    for stem, msg in res.errors.items():
        log.warning("frame %s: %s", stem, msg)
    log.info("evaluated %d of %d frames -> %s", len(res.frames), res.report["n_frames"], out)
    if res.errors and not args.skip_bad:
        return EXIT_FRAMES
    return EXIT_OK


def cmd_derive_srp(args) -> int:
    cfg = load_config(args.config)
    sig = Path(args.sig)
    scene = load_sig(sig, cfg.ontology)
    if cfg.include_lanes:
        scene = scene.with_lane_objects()
    srp = derive_srp(scene, cfg.proximal_edges)
    prefix = Path(args.out_prefix) if args.out_prefix else sig.with_suffix("")
    t_path = Path(f"{prefix}.template.json")
    a_path = Path(f"{prefix}.answers.json")
    _write_json(t_path, srp.template.to_dict())
    _write_json(a_path, srp.answers().to_dict())
    print(f"{len(srp.template)} relations -> {t_path}, {a_path}")
    return EXIT_OK


def cmd_attention_build(args) -> int:
    try:
        cam = CameraSpec.from_dict(json.loads(Path(args.camera).read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise InvalidSpecError(f"{args.camera}: {exc}") from None
    radius = attention_radius(cam)
    points = read_gaze_csv(args.gaze)
    amap = accumulate_gaze(points, radius, (cam.image_w, cam.image_h), args.frame, args.kernel)
    out = Path(args.out)
    write_map(out, amap.values)
    if args.plot:
        from .plotting import plot_grid
        plot_grid(amap.values, out.with_suffix(".png"), "gaze attention")
    print(f"radius {radius:.3f} px, {len(points)} samples -> {out}")
    return EXIT_OK


def cmd_attention_project(args) -> int:
    amap = AttentionMap(read_map(args.map))
    if args.homography:
        h = read_homography_config(args.homography)
    else:
        h = corner_homography(amap.width, amap.height)
    grid = project_attention(amap, h)
    out = Path(args.out)
    write_map(out, grid.values)
    if args.plot:
        from .plotting import plot_grid
        plot_grid(grid.values, out.with_suffix(".png"), "attention grid")
    print(f"grid -> {out}")
    return EXIT_OK


def cmd_gaze_metrics(args) -> int:
    cfg = load_config(args.config)
    pred = read_map(args.pred)
    gt = read_map(args.gt)
    base_path = args.baseline or cfg.baseline
    base = read_map(base_path) if base_path else None
    m = gaze_metrics(pred, gt, base, cfg.epsilon)
    text = json.dumps(m.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = run_bench(args.counts, args.reps, args.seed)
    print(format_table(rows))
    fit = slopes(rows)
    print("log-log slopes: " + ", ".join(f"{k} {v:.2f}" for k, v in fit.items()))
    if args.out:
        out = Path(args.out)
        header = list(rows[0].to_dict())
        _write_csv(out, header, [list(r.to_dict().values()) for r in rows])
        if args.plot:
            from .plotting import plot_bench
            plot_bench(rows, out.with_suffix(".png"))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sigeval", description="Score spatial intelligence grids and relations.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("evaluate", help="score a directory of predicted frames against ground truth")
    e.add_argument("--pred", required=True, help="directory of predicted SIG files")
    e.add_argument("--gt", required=True, help="directory of ground-truth SIG files")
    e.add_argument("--srp-answers", help="directory of SRP answer files (same stems)")
    e.add_argument("--templates", help="directory of SRP template files overriding pair order")
    e.add_argument("--attention-dir", help="directory of 10x10 attention grid files <stem>.txt")
    e.add_argument("--config", help="config JSON (default: $SIG_EVAL_CONFIG, else built-in defaults)")
    e.add_argument("--out", required=True, help="report JSON; a CSV summary is written next to it")
    e.add_argument("--per-frame", action="store_true", help="include per-frame blocks in the report")
    e.add_argument("--human-like", action="store_true", help="also compute attention-weighted metrics")
    e.add_argument("--skip-bad", action="store_true", help="exit 0 even if some frames fail")
    e.add_argument("--jobs", type=int, help="worker processes")
    e.add_argument("--plot", action="store_true", help="also write a PNG summary figure")
    e.set_defaults(func=cmd_evaluate)

    d = sub.add_parser("derive-srp", help="write the SRP template and ground-truth labels of a SIG file")
    d.add_argument("--sig", required=True)
    d.add_argument("--out-prefix", help="output prefix (default: the SIG path without extension)")
    d.add_argument("--config")
    d.set_defaults(func=cmd_derive_srp)

    a = sub.add_parser("attention", help="gaze attention maps")
    asub = a.add_subparsers(dest="attention_command", required=True)
    b = asub.add_parser("build", help="accumulate a gaze CSV into an image-sized map")
    b.add_argument("--gaze", required=True, help="CSV with columns frame,x,y")
    b.add_argument("--camera", required=True, help="camera spec JSON")
    b.add_argument("--frame", type=int, help="use only the six frames ending here")
    b.add_argument("--kernel", choices=(DISK, GAUSSIAN), default=DISK)
    b.add_argument("--out", required=True)
    b.add_argument("--plot", action="store_true")
    b.set_defaults(func=cmd_attention_build)
    pr = asub.add_parser("project", help="project an image map onto the 10x10 grid")
    pr.add_argument("--map", required=True)
    pr.add_argument("--homography", help="correspondence JSON (default: four image corners)")
    pr.add_argument("--out", required=True)
    pr.add_argument("--plot", action="store_true")
    pr.set_defaults(func=cmd_attention_project)

    g = sub.add_parser("gaze-metrics", help="PCC, KL-D and IG between two maps")
    g.add_argument("--pred", required=True)
    g.add_argument("--gt", required=True)
    g.add_argument("--baseline")
    g.add_argument("--config")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gaze_metrics)

    bn = sub.add_parser("bench", help="per-frame metric runtime over object counts")
    bn.add_argument("--counts", type=parse_counts, default=list(DEFAULT_COUNTS),
                    help="comma list, or a,b,...,z to step from a up to z")
    bn.add_argument("--reps", type=int, default=1000)
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--out", help="CSV timing table")
    bn.add_argument("--plot", action="store_true", help="with --out, also write a log-log PNG")
    bn.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SigEvalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FRAMES


if __name__ == "__main__":
    sys.exit(main())
