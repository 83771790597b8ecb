"""Command-line entry points for the lineup pipeline.

Every artifact-producing run writes a manifest.json recording the command,
input digests, seed, outputs, and wall-clock time. Exit codes: 0 success,
2 validation error, 1 internal error."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import ELITE, __version__
from .ensemble import (EnsembleConfig, GRID_PRESETS, TunedEnsembleModel,
                       cross_validate_grid, efficient_frontier, fit_ensemble,
                       frontier_points, select_configuration)
from .evaluation import (accuracy, compare_pmm_groups, confusion, precision,
                         variable_importance, write_boxplot_csv)
from .features import FULL_140, FEATURE_MODES, dataset_vectors
from .ingest import (Dataset, IngestError, aggregate_lineup_observations,
                     dataset_from_dict, dataset_to_dict, filter_merge,
                     load_player_stats, parse_events, segment_stints,
                     split_dataset)
from .rosterlab import (Roster, join_pace, load_pace_csv, load_position_csv,
                        load_roster_csv, predict_roster, single_position_probe,
                        write_prediction_csv)
from .subclassifiers import FitError
from .synth import SynthConfig, generate_synthetic_season

DATA_DIR_ENV = "LINEUP_ANC_DATA_DIR"


def resolve_input(path: str) -> Path:
    """Relative inputs fall back to $LINEUP_ANC_DATA_DIR when not found."""
    p = Path(path)
    if p.exists():
        return p
    root = os.environ.get(DATA_DIR_ENV)
    if root and not p.is_absolute():
        candidate = Path(root) / p
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"input not found: {path}")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class ManifestWriter:
    def __init__(self, command: str, out_dir: Path, seed=None, config_path=None):
        self.record = {
            "command": command,
            "artifact_version": __version__,
            "seed": seed,
            "config_path": str(config_path) if config_path else None,
            "inputs": {},
            "outputs": [],
            "wall_clock_seconds": None,
        }
        self.out_dir = out_dir
        self.started = time.monotonic()

    def add_input(self, path: Path):
        self.record["inputs"][str(path)] = _sha256(path)

    def add_output(self, path: Path):
        self.record["outputs"].append(str(path))

    def write(self):
        self.record["wall_clock_seconds"] = round(
            time.monotonic() - self.started, 3)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(self.record, indent=1, sort_keys=True))
        return path


def _load_dataset(path: Path) -> Dataset:
    with path.open() as fh:
        return dataset_from_dict(json.load(fh))


def _split_part(dataset: Dataset, part: str, fraction: float, seed: int) -> Dataset:
    if part == "all":
        return dataset
    train, test = split_dataset(dataset, fraction, seed)
    return train if part == "train" else test


def cmd_synth(args) -> int:
    out = Path(args.out)
    manifest = ManifestWriter("synth", out, seed=args.seed)
    config = SynthConfig(teams=args.teams, games=args.games,
                         roster_size=args.roster_size, seed=args.seed)
    result = generate_synthetic_season(config, out)
    for p in (result.pbp_path, result.stats_path, result.truth_path):
        manifest.add_output(p)
    manifest.write()
    planted = result.truth["planted"]
    print(f"wrote {result.pbp_path} ({len(result.truth['games'])} games), "
          f"{result.stats_path}, {result.truth_path}")
    print(f"filtered lineups: {planted['n_filtered_lineups']}, "
          f"prevalence: {planted['prevalence']}")
    return 0


def cmd_ingest(args) -> int:
    out = Path(args.out)
    manifest = ManifestWriter("ingest", out)
    pbp_path, stats_path = resolve_input(args.pbp), resolve_input(args.stats)
    manifest.add_input(pbp_path)
    manifest.add_input(stats_path)

    with pbp_path.open() as fh:
        events = parse_events(fh)
    observations = aggregate_lineup_observations(segment_stints(events))
    with stats_path.open() as fh:
        stats = load_player_stats(fh)
    dataset, report = filter_merge(stats, observations,
                                   args.min_player_minutes,
                                   args.min_lineup_minutes)
    out.mkdir(parents=True, exist_ok=True)
    ds_path = out / "dataset.json"
    ds_path.write_text(json.dumps(dataset_to_dict(dataset), sort_keys=True))
    report_path = out / "discard_report.json"
    report_path.write_text(json.dumps(report.to_json(), indent=1))
    manifest.add_output(ds_path)
    manifest.add_output(report_path)
    manifest.write()
    print(f"{len(events)} events -> {len(observations)} lineups -> "
          f"{len(dataset.observations)} kept ({len(report.entries)} discards)")
    return 0


def _parse_policy(text: str) -> dict:
    if text == "max_avg":
        return {"policy": "max_avg"}
    if text.startswith("floor:"):
        return {"policy": "min_precision_floor", "floor": float(text[6:])}
    if text.startswith("index:"):
        return {"policy": "interactive_index", "index": int(text[6:])}
    raise ValueError(f"unknown selection policy {text!r} "
                     "(use max_avg, floor:<f>, or index:<i>)")


def cmd_tune(args) -> int:
    out = Path(args.out)
    manifest = ManifestWriter("tune", out, seed=args.seed)
    ds_path = resolve_input(args.dataset)
    manifest.add_input(ds_path)
    dataset = _load_dataset(ds_path)
    train = _split_part(dataset, "train", args.train_fraction, args.seed)
    grid = GRID_PRESETS[args.grid]()
    policy = _parse_policy(args.select)

    table = cross_validate_grid(train, grid, k=args.folds, seed=args.seed,
                                feature_mode=args.feature_mode)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "tuning_table.csv"
    table.write_csv(csv_path)
    manifest.add_output(csv_path)

    frontier = {}
    for metric in ("min_precision", "avg_accuracy"):
        idx, pts = frontier_points(table, metric)
        keep = efficient_frontier(pts)
        frontier[metric] = [
            {"avg_precision": pts[i][0], metric: pts[i][1],
             "config": table.config_at(int(idx[i]) // table.n_votes,
                                       int(idx[i]) % table.n_votes).to_dict()}
            for i in keep
        ]
    frontier_path = out / "frontier.json"
    frontier_path.write_text(json.dumps(frontier, indent=1, sort_keys=True))
    manifest.add_output(frontier_path)

    config = select_configuration(table, **policy)
    config_path = out / "selected_config.json"
    config_path.write_text(json.dumps(config.to_dict(), indent=1,
                                      sort_keys=True))
    manifest.add_output(config_path)
    manifest.write()
    print(f"tuned {table.n_base * table.n_votes} combinations "
          f"({int(table.has_na.sum())} with NA folds); "
          f"selected num_votes={config.num_votes}")
    return 0


def cmd_train(args) -> int:
    out = Path(args.out)
    manifest = ManifestWriter("train", out, seed=args.seed,
                              config_path=args.config)
    ds_path = resolve_input(args.dataset)
    config_path = resolve_input(args.config)
    manifest.add_input(ds_path)
    manifest.add_input(config_path)
    dataset = _load_dataset(ds_path)
    part = _split_part(dataset, args.part, args.train_fraction, args.seed)
    with config_path.open() as fh:
        config = EnsembleConfig.from_dict(json.load(fh))
    print("config:", json.dumps(config.to_dict(), sort_keys=True))

    model = fit_ensemble(part, config, seed=args.seed)
    out.mkdir(parents=True, exist_ok=True)
    model_path = out / "model.json"
    model.save(model_path)
    manifest.add_output(model_path)
    manifest.write()
    print(f"trained on {model.n_train} lineups -> {model_path}")
    return 0


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    manifest = ManifestWriter("evaluate", out, seed=args.seed)
    model_path = resolve_input(args.model)
    ds_path = resolve_input(args.dataset)
    manifest.add_input(model_path)
    manifest.add_input(ds_path)
    model = TunedEnsembleModel.load(model_path)
    dataset = _load_dataset(ds_path)
    part = _split_part(dataset, args.part, args.train_fraction, args.seed)
    observations = [o for o in part.observations
                    if o.minutes >= args.min_lineup_minutes]
    if not observations:
        raise IngestError("no observations left after the minutes restriction")
    eval_ds = Dataset(observations, part.feature_source)

    labels, _ = model.predict_vectors(
        dataset_vectors(eval_ds, model.config.feature_mode))
    truths = [o.label for o in observations]
    cm = confusion(labels, truths)
    prevalence = sum(t == ELITE for t in truths) / len(truths)
    report = {
        "n": cm.n,
        "confusion": cm.to_dict(),
        "precision": precision(cm),
        "accuracy": accuracy(cm),
        "prevalence": prevalence,
        "min_lineup_minutes": args.min_lineup_minutes,
    }
    try:
        report["group_comparison"] = compare_pmm_groups(observations,
                                                        labels).to_dict()
    except ValueError as err:
        report["group_comparison"] = {"error": str(err)}
    report["importance"] = variable_importance(model)

    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "evaluation_report.json"
    report_path.write_text(json.dumps(report, indent=1, sort_keys=True))
    box_path = out / "boxplot.csv"
    write_boxplot_csv(box_path, observations, labels)
    manifest.add_output(report_path)
    manifest.add_output(box_path)
    manifest.write()
    prec = report["precision"]
    print(f"n={cm.n} precision="
          f"{'NA' if prec is None else f'{prec:.4f}'} "
          f"accuracy={report['accuracy']:.4f} prevalence={prevalence:.4f}")
    return 0


def cmd_predict(args) -> int:
    out = Path(args.out)
    manifest = ManifestWriter("predict", out)
    model_path = resolve_input(args.model)
    roster_path = resolve_input(args.roster)
    stats_path = resolve_input(args.stats)
    for p in (model_path, roster_path, stats_path):
        manifest.add_input(p)
    model = TunedEnsembleModel.load(model_path)
    with stats_path.open() as fh:
        stats = {rec.player_id: rec for rec in load_player_stats(fh)}
    with roster_path.open() as fh:
        rosters = load_roster_csv(fh)

    blocks = []
    counts = {}
    for team in sorted(rosters):
        roster = Roster.build(team, rosters[team], stats,
                              args.min_player_minutes)
        block = predict_roster(model, roster, stats)
        blocks.append(block)
        counts[team] = block["elite_count"]
        print(f"{team}: {len(block['results'])} lineups evaluated, "
              f"{block['elite_count']} elite, "
              f"{len(block['skipped_players'])} players skipped")

    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "predictions.csv"
    write_prediction_csv(csv_path, blocks)
    counts_path = out / "elite_counts.json"
    payload = {"counts": counts,
               "skipped": {b["team"]: b["skipped_players"] for b in blocks}}
    if args.pace:
        pace_path = resolve_input(args.pace)
        manifest.add_input(pace_path)
        with pace_path.open() as fh:
            payload["pace_rows"] = join_pace(counts, load_pace_csv(fh))
    counts_path.write_text(json.dumps(payload, indent=1, sort_keys=True))
    manifest.add_output(csv_path)
    manifest.add_output(counts_path)
    manifest.write()
    return 0


def cmd_probe(args) -> int:
    out = Path(args.out)
    manifest = ManifestWriter("probe", out, seed=args.seed)
    model_path = resolve_input(args.model)
    stats_path = resolve_input(args.stats)
    pos_path = resolve_input(args.positions)
    for p in (model_path, stats_path, pos_path):
        manifest.add_input(p)
    model = TunedEnsembleModel.load(model_path)
    with stats_path.open() as fh:
        stats = {rec.player_id: rec for rec in load_player_stats(fh)}
    with pos_path.open() as fh:
        pos_map = load_position_csv(fh)

    pools: dict[str, list[str]] = {}
    for pid, classes in pos_map.items():
        if len(classes) == 1 and pid in stats \
                and stats[pid].total_minutes >= args.min_minutes:
            pools.setdefault(next(iter(classes)), []).append(pid)
    counts = single_position_probe(model, pools, stats,
                                   samples=args.samples, seed=args.seed)
    out.mkdir(parents=True, exist_ok=True)
    probe_path = out / "single_position_probe.json"
    probe_path.write_text(json.dumps(
        {"samples": args.samples,
         "pools": {k: len(v) for k, v in pools.items()},
         "elite_counts": counts}, indent=1, sort_keys=True))
    manifest.add_output(probe_path)
    manifest.write()
    print(json.dumps(counts, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    model = TunedEnsembleModel.load(resolve_input(args.model))
    with resolve_input(args.stats).open() as fh:
        stats = {rec.player_id: rec for rec in load_player_stats(fh)}
    app = create_app(model, stats)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lineup-anc",
        description="Elite five-person lineup prediction pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic season")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--teams", type=int, default=6)
    p.add_argument("--games", type=int, default=40)
    p.add_argument("--roster-size", type=int, default=9)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="parse play-by-play and player stats")
    p.add_argument("--pbp", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-player-minutes", type=float, default=50.0)
    p.add_argument("--min-lineup-minutes", type=float, default=25.0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("tune", help="grid-search the ensemble by 10-fold CV")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grid", choices=sorted(GRID_PRESETS), default="mini")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--feature-mode", choices=FEATURE_MODES, default=FULL_140)
    p.add_argument("--select", default="max_avg",
                   help="max_avg, floor:<f>, or index:<i>")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("train", help="fit the ensemble with a config file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--part", choices=("all", "train", "test"), default="all")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="confusion matrix and group comparison")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--part", choices=("all", "train", "test"), default="test")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-lineup-minutes", type=float, default=0.0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="score all lineups on given rosters")
    p.add_argument("--model", required=True)
    p.add_argument("--roster", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pace", default=None,
                   help="optional team,pace CSV to join into the counts")
    p.add_argument("--min-player-minutes", type=float, default=50.0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("probe", help="single-position lineup probe")
    p.add_argument("--model", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--positions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-minutes", type=float, default=2100.0)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("serve", help="serve the model over JSON HTTP")
    p.add_argument("--model", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, FitError, FileNotFoundError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # pragma: no cover - defensive
        print(f"internal error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
