"""Batch command-line tooling.

Subcommands:
    build-db       exemplar database from a directory of frame files
    analyze        per-frame diagnosis report (JSON-lines + summary)
    sweep-ea       classification error rate across E-A ratios
                   (printed table + CSV + PNG figure)
    gen-synthetic  deterministic synthetic corpora with ground truth
    serve          run the streaming service

Frame files use the PoseFrame wire JSON; corpus directories carry a
truth.json sidecar mapping filename -> ground truth (written by
gen-synthetic and consumed by sweep-ea / build-db).

Exit codes: 0 success, 1 input error, 2 internal error.
"""

from __future__ import annotations

import json
import os
import sys
import traceback

import click

from . import filling, matching, rules, synthetic
from .errors import FormcheckError, UnfillableFrame
from .matching import DEFAULT_EA_RATIO, PoseDatabase
from .model import PoseFrame, PoseLabel
from .rules import RuleParams

TRUTH_FILE = "truth.json"


class InputError(click.ClickException):
    exit_code = 1


def _load_truth(corpus_dir: str) -> dict:
    path = os.path.join(corpus_dir, TRUTH_FILE)
    if not os.path.exists(path):
        raise InputError(f"no {TRUTH_FILE} in {corpus_dir}")
    with open(path) as fh:
        return json.load(fh)


def _frame_files(directory: str) -> list[str]:
    try:
        names = sorted(os.listdir(directory))
    except OSError as exc:
        raise InputError(str(exc)) from None
    return [n for n in names if n.endswith(".json") and n != TRUTH_FILE]


def _load_frame(directory: str, name: str) -> PoseFrame:
    with open(os.path.join(directory, name)) as fh:
        return PoseFrame.from_json(fh.read())


def _params_from_flags(plank_threshold_deg: float, knee_tolerance_rad: float,
                       weight_fraction_threshold: float) -> RuleParams:
    try:
        return RuleParams(plank_threshold_deg, knee_tolerance_rad,
                          weight_fraction_threshold)
    except ValueError as exc:
        raise InputError(str(exc)) from None


_PARAM_OPTIONS = [
    click.option("--plank-threshold-deg", type=float, default=165.0,
                 show_default=True,
                 help="Minimum back angle for a correct plank."),
    click.option("--knee-tolerance-rad", type=float,
                 default=RuleParams().knee_tolerance_rad,
                 show_default=True,
                 help="Allowed squat knee-angle deviation from 90 degrees."),
    click.option("--weight-fraction-threshold", type=float, default=0.8,
                 show_default=True,
                 help="Lower bound of the correct squat weight fraction."),
]


def _with_param_options(cmd):
    for opt in reversed(_PARAM_OPTIONS):
        cmd = opt(cmd)
    return cmd


@click.group()
def cli():
    """Exercise-form analysis tooling."""


@cli.command("build-db")
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--labels", "labels_path", type=click.Path(exists=True),
              default=None,
              help="JSON file mapping filename -> label (defaults to the "
                   "corpus truth.json).")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Output database JSON path.")
@click.option("--ea-ratio", type=float, default=DEFAULT_EA_RATIO,
              show_default=True, help="Default E-A mixing ratio stored "
                                      "in the database.")
def cmd_build_db(input_dir: str, labels_path: str | None, out_path: str,
                 ea_ratio: float):
    """Build an exemplar database from labeled frame files."""
    if labels_path is None:
        labels = _load_truth(input_dir)
    else:
        with open(labels_path) as fh:
            labels = json.load(fh)

    entries = []
    skipped_unlabeled = 0
    for name in _frame_files(input_dir):
        info = labels.get(name)
        label_str = info.get("label") if isinstance(info, dict) else info
        if not label_str:
            click.echo(f"warning: no label for {name}, skipped", err=True)
            skipped_unlabeled += 1
            continue
        entries.append((_load_frame(input_dir, name),
                        PoseLabel.parse(label_str), name))

    skipped_features: list[tuple[str, str]] = []
    try:
        db = matching.build_database(entries, ea_ratio, skipped_features)
    except FormcheckError as exc:
        raise InputError(str(exc)) from None
    for source_id, reason in skipped_features:
        click.echo(f"warning: {source_id} skipped: {reason}", err=True)

    db.save(out_path)
    counts = db.label_counts()
    click.echo(", ".join(f"{label}: {n}" for label, n in sorted(counts.items())))
    click.echo(f"wrote {len(db)} exemplars to {out_path}")


@cli.command("analyze")
@click.argument("frames_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--db", "db_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--ea-ratio", type=float, default=None,
              help="Override the database's E-A ratio.")
@click.option("--out", "out_path", type=click.Path(), default="-",
              help="Report destination (default stdout).")
@_with_param_options
def cmd_analyze(frames_dir: str, db_path: str, ea_ratio: float | None,
                out_path: str, plank_threshold_deg: float,
                knee_tolerance_rad: float, weight_fraction_threshold: float):
    """Diagnose every frame in a directory; JSON-lines plus a summary."""
    db = PoseDatabase.load(db_path)
    params = _params_from_flags(plank_threshold_deg, knee_tolerance_rad,
                                weight_fraction_threshold)

    out = sys.stdout if out_path == "-" else open(out_path, "w")
    label_counts: dict[str, int] = {}
    error_counts: dict[str, int] = {}
    unfillable = 0
    total = 0
    try:
        for name in _frame_files(frames_dir):
            total += 1
            frame = _load_frame(frames_dir, name)
            try:
                filled, _ = filling.fill_missing(frame)
                match = matching.classify(filled, db, ea_ratio)
                diag = rules.diagnose(filled, match, params)
            except UnfillableFrame as exc:
                unfillable += 1
                out.write(json.dumps({"file": name, "error": "unfillable",
                                      "detail": str(exc)}) + "\n")
                continue
            row = {"file": name}
            row.update(diag.to_json_obj())
            row["match"] = {"label": match.label.value,
                            "distance": match.distance,
                            "src": match.best_source_id}
            out.write(json.dumps(row) + "\n")
            label_counts[diag.label.value] = label_counts.get(diag.label.value, 0) + 1
            for code in diag.errors:
                error_counts[code.value] = error_counts.get(code.value, 0) + 1
        summary = {"frames": total, "unfillable": unfillable,
                   "labels": dict(sorted(label_counts.items())),
                   "errors": dict(sorted(error_counts.items()))}
        out.write(json.dumps({"summary": summary}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


@cli.command("sweep-ea")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--db", "db_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--ratios", default="2,1,0.5", show_default=True,
              help="Comma-separated E-A ratios to evaluate.")
@click.option("--csv", "csv_path", type=click.Path(), default="sweep.csv",
              show_default=True, help="Machine-readable results.")
@click.option("--figure", "figure_path", type=click.Path(),
              default="sweep.png", show_default=True,
              help="Rendered error-rate curve.")
def cmd_sweep_ea(corpus_dir: str, db_path: str, ratios: str, csv_path: str,
                 figure_path: str):
    """Misclassification rate of a labeled corpus across E-A ratios."""
    try:
        ratio_values = [float(r) for r in ratios.split(",") if r.strip()]
    except ValueError:
        raise InputError(f"bad --ratios value: {ratios!r}") from None
    if not ratio_values:
        raise InputError("at least one ratio is required")

    db = PoseDatabase.load(db_path)
    truth = _load_truth(corpus_dir)
    labeled = []
    for name in _frame_files(corpus_dir):
        info = truth.get(name)
        if not info:
            raise InputError(f"{name} missing from {TRUTH_FILE}")
        frame = _load_frame(corpus_dir, name)
        filled, _ = filling.fill_missing(frame)
        labeled.append((filled, PoseLabel.parse(info["label"])))
    if not labeled:
        raise InputError(f"no frame files in {corpus_dir}")

    rows = []
    for ratio in ratio_values:
        wrong = sum(1 for frame, label in labeled
                    if matching.classify(frame, db, ratio).label is not label)
        rows.append((ratio, wrong, len(labeled), wrong / len(labeled)))

    # table and CSV carry the same formatted values
    header = ("ea_ratio", "errors", "frames", "error_rate")
    formatted = [(f"{r:g}", str(w), str(n), f"{rate:.4f}")
                 for r, w, n, rate in rows]
    click.echo("\t".join(header))
    for row in formatted:
        click.echo("\t".join(row))
    with open(csv_path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in formatted:
            fh.write(",".join(row) + "\n")

    from . import plots
    plots.sweep_figure([r for r, *_ in rows], [rate for *_, rate in rows],
                       figure_path)
    click.echo(f"wrote {csv_path} and {figure_path}")


@cli.command("gen-synthetic")
@click.argument("kind", type=click.Choice(synthetic.KINDS))
@click.option("-n", "count", type=int, required=True,
              help="Number of frames to generate.")
@click.option("--noise", type=float, default=0.0, show_default=True,
              help="Coordinate jitter as a fraction of the bbox diagonal.")
@click.option("--seed", type=int, required=True)
@click.option("--out-dir", required=True, type=click.Path())
def cmd_gen_synthetic(kind: str, count: int, noise: float, seed: int,
                      out_dir: str):
    """Write a deterministic corpus of frame files plus a truth sidecar."""
    if count <= 0:
        raise InputError("-n must be positive")
    if noise < 0:
        raise InputError("--noise must be >= 0")
    os.makedirs(out_dir, exist_ok=True)

    truth_path = os.path.join(out_dir, TRUTH_FILE)
    truth = {}
    if os.path.exists(truth_path):
        with open(truth_path) as fh:
            truth = json.load(fh)

    for i, (frame, gt) in enumerate(synthetic.generate(kind, count, noise, seed)):
        name = f"{kind}_{seed:04d}_{i:05d}.json"
        with open(os.path.join(out_dir, name), "w") as fh:
            json.dump(frame.to_json_obj(), fh, sort_keys=True)
        truth[name] = gt.to_json_obj()

    with open(truth_path, "w") as fh:
        json.dump(truth, fh, sort_keys=True, indent=1)
    click.echo(f"wrote {count} {kind} frames to {out_dir}")


@cli.command("serve")
@click.option("--db", "db_path", type=click.Path(), default=None,
              help="Exemplar database path (FDR_DB env overrides).")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--ea-ratio", type=float, default=None,
              help="Override the database's E-A ratio.")
def cmd_serve(db_path: str | None, port: int, ea_ratio: float | None):
    """Run the streaming analysis service."""
    from . import service

    resolved = service.resolve_db_path(db_path)
    if not resolved:
        raise InputError("no database: pass --db or set FDR_DB")
    if not os.path.exists(resolved):
        raise InputError(f"database not found: {resolved}")
    service.serve(resolved, port, ea_ratio)


def main() -> None:
    try:
        cli.main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(1)
    except (FormcheckError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except Exception:
        traceback.print_exc()
        sys.exit(2)


if __name__ == "__main__":
    main()
