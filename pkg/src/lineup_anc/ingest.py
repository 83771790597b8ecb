"""Play-by-play ingestion: events -> stints -> lineup observations, plus
player season stats loading, filtering, and train/test splitting."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import ELITE, NOT_ELITE

# The 28 per-minute individual statistics, in canonical column order.
STAT_NAMES = [
    "FGM", "FGA", "FGPCT", "FG3M", "FG3A", "FG3PCT", "FTM", "FTA", "FTPCT",
    "OREB", "DREB", "AST", "TOV", "STL", "BLK", "BLKA", "PF", "PTS", "PFD",
    "PMM", "CONTESTEDSHOTS", "CONTESTEDSHOTS2PT", "CONTESTEDSHOTS3PT",
    "CHARGESDRAWN", "DEFLECTIONS", "LOOSEBALLSRECOVERED", "SCREENASSISTS",
    "BOXOUTS",
]

# Percentage columns and the attempt columns whose zero value forces them to 0.
PCT_DENOMINATORS = {"FGPCT": "FGA", "FG3PCT": "FG3A", "FTPCT": "FTA"}

NAME_SUFFIX_TOKENS = {"jr", "sr", "ii", "iii", "iv"}

DEFAULT_PBP_SCHEMA = {
    "game_id": "game_id",
    "elapsed_seconds": "elapsed_seconds",
    "home_players": ["h1", "h2", "h3", "h4", "h5"],
    "away_players": ["a1", "a2", "a3", "a4", "a5"],
    "home_points": "home_pts",
    "away_points": "away_pts",
}


class IngestError(ValueError):
    """Raised for malformed or inconsistent input data."""


def normalize_player_name(raw: str) -> str:
    """Canonicalize a player name: casefold, drop punctuation (hyphens become
    spaces), strip generational suffixes, collapse whitespace. Idempotent."""
    if not raw:
        raise IngestError("empty player name")
    text = raw.casefold().replace("-", " ")
    text = "".join(ch for ch in text if ch.isalnum() or ch.isspace())
    tokens = [t for t in text.split() if t not in NAME_SUFFIX_TOKENS]
    if not tokens:
        raise IngestError(f"player name {raw!r} is empty after normalization")
    return " ".join(tokens)


Lineup = tuple[str, str, str, str, str]


def make_lineup(player_ids: Iterable[str]) -> Lineup:
    """Build the canonical lineup key: 5 distinct ids, ascending order."""
    ids = tuple(sorted(player_ids))
    if len(ids) != 5 or len(set(ids)) != 5:
        raise IngestError(f"lineup must have 5 distinct players, got {ids}")
    return ids  # type: ignore[return-value]


@dataclass(frozen=True)
class PlayEvent:
    game_id: str
    elapsed_seconds: float
    home_players: Lineup
    away_players: Lineup
    home_points_scored: int
    away_points_scored: int


@dataclass(frozen=True)
class Stint:
    """Maximal interval of one game with a fixed set of ten players."""
    game_id: str
    lineup_home: Lineup
    lineup_away: Lineup
    start_seconds: float
    end_seconds: float
    home_point_diff: int

    @property
    def duration_minutes(self) -> float:
        return (self.end_seconds - self.start_seconds) / 60.0


@dataclass(frozen=True)
class LineupObservation:
    lineup: Lineup
    minutes: float
    point_diff: float
    pmm: float
    label: str

    def __post_init__(self):
        if self.minutes <= 0:
            raise IngestError(f"lineup {self.lineup} has non-positive minutes")
        if abs(self.pmm * self.minutes - self.point_diff) > 1e-9:
            raise IngestError(f"pmm * minutes != point_diff for {self.lineup}")

    @staticmethod
    def from_totals(lineup: Lineup, minutes: float, point_diff: float) -> "LineupObservation":
        pmm = point_diff / minutes
        label = ELITE if pmm > 0 else NOT_ELITE
        return LineupObservation(lineup, minutes, point_diff, pmm, label)


@dataclass(frozen=True)
class PlayerSeasonStats:
    player_id: str
    team: str
    total_minutes: float
    stats: dict[str, float]

    @property
    def pmm(self) -> float:
        return self.stats["PMM"]


@dataclass
class Dataset:
    observations: list[LineupObservation]
    feature_source: dict[str, PlayerSeasonStats]

    def __len__(self) -> int:
        return len(self.observations)


@dataclass
class DiscardReport:
    entries: list[dict] = field(default_factory=list)

    def add(self, kind: str, item_id: str, reason: str):
        self.entries.append({"kind": kind, "id": item_id, "reason": reason})

    def to_json(self) -> list[dict]:
        return list(self.entries)


def _parse_number(cell: str, line_num: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise IngestError(
            f"non-numeric value {cell!r} in column {column} at line {line_num}"
        ) from None


def parse_events(stream: Iterable[str], schema: dict | None = None) -> list[PlayEvent]:
    """Parse a play-by-play CSV into events. Rows grouped by game retain file
    order; per-game timestamps must be non-decreasing."""
    schema = schema or DEFAULT_PBP_SCHEMA
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty play-by-play stream") from None

    col = {name: i for i, name in enumerate(header)}
    needed = (
        [schema["game_id"], schema["elapsed_seconds"], schema["home_points"],
         schema["away_points"]]
        + list(schema["home_players"]) + list(schema["away_players"])
    )
    for name in needed:
        if name not in col:
            raise IngestError(f"play-by-play header missing column {name!r}")

    events: list[PlayEvent] = []
    last_time: dict[str, float] = {}
    for line_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise IngestError(f"malformed row at line {line_num}: expected "
                              f"{len(header)} fields, got {len(row)}")
        game_id = row[col[schema["game_id"]]]
        t = _parse_number(row[col[schema["elapsed_seconds"]]], line_num,
                          schema["elapsed_seconds"])
        if t < 0:
            raise IngestError(f"negative elapsed_seconds at line {line_num}")
        if game_id in last_time and t < last_time[game_id]:
            raise IngestError(
                f"elapsed_seconds decreases within game {game_id} at line {line_num}"
            )
        last_time[game_id] = t

        sides = []
        for cols in (schema["home_players"], schema["away_players"]):
            names = [normalize_player_name(row[col[c]]) for c in cols]
            if len(set(names)) != 5:
                raise IngestError(
                    f"duplicate player on one side in game {game_id} at t={t:g}s"
                )
            sides.append(make_lineup(names))

        pts = []
        for c in (schema["home_points"], schema["away_points"]):
            v = _parse_number(row[col[c]], line_num, c)
            if v < 0 or v != int(v):
                raise IngestError(
                    f"point delta must be a non-negative integer at line {line_num}"
                )
            pts.append(int(v))

        events.append(PlayEvent(game_id, t, sides[0], sides[1], pts[0], pts[1]))
    return events


def _iter_games(events: list[PlayEvent]) -> Iterator[list[PlayEvent]]:
    by_game: dict[str, list[PlayEvent]] = {}
    for ev in events:
        by_game.setdefault(ev.game_id, []).append(ev)
    yield from by_game.values()


def segment_stints(events: list[PlayEvent]) -> list[Stint]:
    """Merge consecutive same-ten-player events into stints.

    A stint spans from its first event to the first event of the next run
    (or the game's last event). Zero-duration runs are dropped; their point
    deltas fold into the following stint so game score totals stay exact.
    """
    stints: list[Stint] = []
    for game in _iter_games(events):
        runs: list[list] = []  # [start, end, home_lineup, away_lineup, diff]
        for ev in game:
            if ev.elapsed_seconds < (runs[-1][1] if runs else 0):
                raise IngestError(f"negative time span in game {ev.game_id}")
            delta = ev.home_points_scored - ev.away_points_scored
            if runs and runs[-1][2] == ev.home_players and runs[-1][3] == ev.away_players:
                runs[-1][1] = ev.elapsed_seconds
                runs[-1][4] += delta
            else:
                if runs:
                    runs[-1][1] = ev.elapsed_seconds  # close previous run here
                runs.append([ev.elapsed_seconds, ev.elapsed_seconds,
                             ev.home_players, ev.away_players, delta])

        carried = 0
        for start, end, home, away, diff in runs:
            if end - start <= 0:
                carried += diff
                continue
            stints.append(Stint(game[0].game_id, home, away,
                                start, end, diff + carried))
            carried = 0
        if carried and stints and stints[-1].game_id == game[0].game_id:
            last = stints.pop()
            stints.append(Stint(last.game_id, last.lineup_home, last.lineup_away,
                                last.start_seconds, last.end_seconds,
                                last.home_point_diff + carried))
    return stints


def aggregate_lineup_observations(stints: list[Stint]) -> list[LineupObservation]:
    """Accumulate minutes and signed point differential per distinct lineup.
    Both sides of every stint contribute; the away side's diff is negated."""
    if not stints:
        raise IngestError("no stints to aggregate")
    totals: dict[Lineup, list[float]] = {}
    for st in stints:
        for lineup, diff in ((st.lineup_home, st.home_point_diff),
                             (st.lineup_away, -st.home_point_diff)):
            acc = totals.setdefault(lineup, [0.0, 0.0])
            acc[0] += st.duration_minutes
            acc[1] += diff
    return [LineupObservation.from_totals(lu, m, d) for lu, (m, d) in totals.items()]


def load_player_stats(stream: Iterable[str]) -> list[PlayerSeasonStats]:
    """Load the player season stats CSV (player, team, minutes + 28 stats)."""
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty player stats stream") from None
    col = {name: i for i, name in enumerate(header)}
    for name in ["player", "minutes"] + STAT_NAMES:
        if name not in col:
            raise IngestError(f"player stats header missing column {name!r}")

    records: list[PlayerSeasonStats] = []
    seen: set[str] = set()
    for line_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise IngestError(f"malformed row at line {line_num}")
        player_id = normalize_player_name(row[col["player"]])
        if player_id in seen:
            raise IngestError(f"duplicate player {player_id!r} at line {line_num}")
        seen.add(player_id)
        team = row[col["team"]] if "team" in col else ""
        minutes = _parse_number(row[col["minutes"]], line_num, "minutes")
        if minutes < 0:
            raise IngestError(f"negative minutes at line {line_num}")

        stats: dict[str, float] = {}
        for name in STAT_NAMES:
            cell = row[col[name]].strip()
            denom_col = PCT_DENOMINATORS.get(name)
            if denom_col is not None:
                denom = _parse_number(row[col[denom_col]].strip() or "0",
                                      line_num, denom_col)
                if denom == 0 or cell in ("", "NA", "NaN", "nan"):
                    stats[name] = 0.0
                    continue
            value = _parse_number(cell, line_num, name)
            if denom_col is not None and not 0.0 <= value <= 1.0:
                raise IngestError(
                    f"percentage {name} out of [0, 1] at line {line_num}"
                )
            stats[name] = value
        records.append(PlayerSeasonStats(player_id, team, minutes, stats))
    return records


def filter_merge(
    stats: list[PlayerSeasonStats],
    observations: list[LineupObservation],
    min_player_minutes: float = 50.0,
    min_lineup_minutes: float = 25.0,
) -> tuple[Dataset, DiscardReport]:
    """Apply the minimum-minutes filters and drop lineups whose players are
    missing or filtered. Returns the surviving dataset plus a discard report."""
    report = DiscardReport()
    by_id = {rec.player_id: rec for rec in stats}
    eligible: dict[str, PlayerSeasonStats] = {}
    for rec in stats:
        if rec.total_minutes < min_player_minutes:
            report.add("player", rec.player_id, "low_minutes")
        else:
            eligible[rec.player_id] = rec

    kept: list[LineupObservation] = []
    for obs in observations:
        key = "|".join(obs.lineup)
        if any(p not in by_id for p in obs.lineup):
            report.add("lineup", key, "unmatched")
        elif any(p not in eligible for p in obs.lineup):
            report.add("lineup", key, "filtered_player")
        elif obs.minutes < min_lineup_minutes:
            report.add("lineup", key, "low_minutes")
        else:
            kept.append(obs)

    if not kept:
        raise IngestError("no lineup observations survive filtering")
    return Dataset(kept, eligible), report


def dataset_to_dict(dataset: Dataset) -> dict:
    return {
        "observations": [
            {"lineup": list(o.lineup), "minutes": o.minutes,
             "point_diff": o.point_diff}
            for o in dataset.observations
        ],
        "players": {
            pid: {"team": rec.team, "minutes": rec.total_minutes,
                  "stats": rec.stats}
            for pid, rec in dataset.feature_source.items()
        },
    }


def dataset_from_dict(d: dict) -> Dataset:
    observations = [
        LineupObservation.from_totals(make_lineup(rec["lineup"]),
                                      rec["minutes"], rec["point_diff"])
        for rec in d["observations"]
    ]
    players = {
        pid: PlayerSeasonStats(pid, rec["team"], rec["minutes"],
                               {s: float(rec["stats"][s]) for s in STAT_NAMES})
        for pid, rec in d["players"].items()
    }
    return Dataset(observations, players)


def split_dataset(
    dataset: Dataset, train_fraction: float = 0.8, seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Seeded uniform partition into train/test by the floor rule."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    n = len(dataset.observations)
    if n < 10:
        raise IngestError(f"dataset of size {n} is too small to split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = math.floor(n * train_fraction)
    train_idx = sorted(perm[:n_train].tolist())
    test_idx = sorted(perm[n_train:].tolist())
    obs = dataset.observations
    return (
        Dataset([obs[i] for i in train_idx], dataset.feature_source),
        Dataset([obs[i] for i in test_idx], dataset.feature_source),
    )
