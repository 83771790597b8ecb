"""Roster tools: enumerate candidate lineups, apply a trained ensemble across
seasons, and run the positional-balance, single-position, and pace probes."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from . import ELITE
from .ensemble import TunedEnsembleModel
from .features import order_statistics
from .ingest import Lineup, PlayerSeasonStats, make_lineup, normalize_player_name

POSITION_CLASSES = ("C", "PF", "PG", "SG", "SF")


@dataclass(frozen=True)
class Roster:
    team: str
    eligible: tuple[str, ...]
    skipped: tuple[tuple[str, str], ...]  # (player, reason)

    @staticmethod
    def build(team: str, players: Iterable[str],
              stats: dict[str, PlayerSeasonStats],
              min_minutes: float = 50.0) -> "Roster":
        """Eligibility mirrors the training-season filter: players need a stats
        record with at least min_minutes of prior-season playing time."""
        eligible, skipped = [], []
        for raw in players:
            pid = normalize_player_name(raw)
            rec = stats.get(pid)
            if rec is None:
                skipped.append((pid, "no_prior_season_stats"))
            elif rec.total_minutes < min_minutes:
                skipped.append((pid, "low_prior_season_minutes"))
            else:
                eligible.append(pid)
        return Roster(team, tuple(sorted(eligible)), tuple(skipped))


def enumerate_lineups(roster: Roster) -> list[Lineup]:
    """All C(n, 5) combinations of eligible players, lexicographic order."""
    if len(roster.eligible) < 5:
        raise ValueError(f"roster {roster.team} has only "
                         f"{len(roster.eligible)} eligible players")
    return [make_lineup(combo) for combo in combinations(roster.eligible, 5)]


def predict_roster(model: TunedEnsembleModel, roster: Roster,
                   stats: dict[str, PlayerSeasonStats]) -> dict:
    """ANC verdicts for every eligible lineup on the roster.

    Features come from the supplied (prior-season) stats table; the model's
    own standardizer shifts and scales them, which is the cross-season
    contract."""
    lineups = enumerate_lineups(roster)
    vectors = [order_statistics(lineup, stats) for lineup in lineups]
    labels, votes = model.predict_vectors(vectors)
    results = [{"lineup": lineup, "label": label, "votes": panel}
               for lineup, label, panel in zip(lineups, labels, votes)]
    return {
        "team": roster.team,
        "results": results,
        "elite_count": sum(r["label"] == ELITE for r in results),
        "skipped_players": list(roster.skipped),
    }


def position_balance(lineups: Iterable[Lineup],
                     pos_map: dict[str, set[str]]) -> dict[int, float]:
    """Histogram (proportions) of distinct position classes per lineup; a
    combination player contributes every class they hold."""
    counts = {i: 0 for i in range(1, 6)}
    total = 0
    for lineup in lineups:
        classes: set[str] = set()
        for p in lineup:
            if p not in pos_map:
                raise KeyError(f"player {p!r} has no position mapping")
            classes |= pos_map[p]
        counts[len(classes)] += 1
        total += 1
    if total == 0:
        raise ValueError("no lineups to tally")
    return {k: v / total for k, v in counts.items()}


def single_position_probe(model: TunedEnsembleModel,
                          players_by_position: dict[str, list[str]],
                          stats: dict[str, PlayerSeasonStats],
                          samples: int = 200, seed: int = 0) -> dict[str, int]:
    """Sample same-position lineups uniformly and count elite verdicts."""
    rng = np.random.default_rng(seed)
    out: dict[str, int] = {}
    for position in sorted(players_by_position):
        pool = sorted(players_by_position[position])
        if len(pool) < 5:
            raise ValueError(f"position {position} pool has {len(pool)} "
                             "players; need at least 5")
        elite = 0
        for _ in range(samples):
            ids = rng.choice(pool, size=5, replace=False)
            vec = order_statistics(make_lineup(ids), stats)
            labels, _ = model.predict_vectors([vec])
            elite += labels[0] == ELITE
        out[position] = elite
    return out


def join_pace(team_elite_counts: dict[str, int],
              pace_table: dict[str, float]) -> list[dict]:
    """One scatter row per team; raw join, no trend fitting."""
    rows = []
    for team in sorted(team_elite_counts):
        if team not in pace_table:
            raise KeyError(f"team {team!r} missing from pace table")
        rows.append({"team": team, "elite_count": team_elite_counts[team],
                     "pace": pace_table[team]})
    return rows


def load_roster_csv(stream) -> dict[str, list[str]]:
    """CSV columns team,player -> {team: [raw player names]}."""
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or {"team", "player"} - set(reader.fieldnames):
        raise ValueError("roster CSV needs columns team,player")
    rosters: dict[str, list[str]] = {}
    for row in reader:
        rosters.setdefault(row["team"], []).append(row["player"])
    return rosters


def load_position_csv(stream) -> dict[str, set[str]]:
    """CSV columns player,positions (semicolon-separated class codes)."""
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or {"player", "positions"} - set(reader.fieldnames):
        raise ValueError("position CSV needs columns player,positions")
    mapping: dict[str, set[str]] = {}
    for row in reader:
        classes = {c.strip() for c in row["positions"].split(";") if c.strip()}
        bad = classes - set(POSITION_CLASSES)
        if bad:
            raise ValueError(f"unknown position classes {sorted(bad)}")
        if not classes:
            raise ValueError(f"player {row['player']!r} has no position class")
        mapping[normalize_player_name(row["player"])] = classes
    return mapping


def load_pace_csv(stream) -> dict[str, float]:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or {"team", "pace"} - set(reader.fieldnames):
        raise ValueError("pace CSV needs columns team,pace")
    return {row["team"]: float(row["pace"]) for row in reader}


def write_prediction_csv(path, predictions: list[dict]):
    """Export rows (team, lineup, label, vote_tree, ..., vote_lda)."""
    from .ensemble import FAMILIES
    with open(path, "w") as fh:
        fh.write("team,lineup,label," + ",".join(f"vote_{f}" for f in FAMILIES)
                 + "\n")
        for block in predictions:
            for rec in block["results"]:
                fh.write(",".join([block["team"], "|".join(rec["lineup"]),
                                   rec["label"], *rec["votes"]]) + "\n")
