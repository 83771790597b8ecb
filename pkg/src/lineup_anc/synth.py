"""Deterministic synthetic-season generator.

Emits a play-by-play CSV, a player-stats CSV, and a ground-truth JSON that
records every stint and lineup total so ingestion can be verified against an
independent bookkeeping path. Lineup outcomes are driven by a planted latent
skill per player, so order-statistic classifiers have learnable signal."""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

# (name, base, skill_loading, noise_sd) for the non-percentage per-minute rates.
_RATE_MODEL = [
    ("FGM", 0.15, 0.030, 0.020),
    ("FGA", 0.35, 0.030, 0.040),
    ("FG3M", 0.04, 0.010, 0.010),
    ("FG3A", 0.12, 0.020, 0.030),
    ("FTM", 0.06, 0.015, 0.015),
    ("FTA", 0.08, 0.015, 0.015),
    ("OREB", 0.04, 0.005, 0.010),
    ("DREB", 0.12, 0.020, 0.020),
    ("AST", 0.08, 0.020, 0.015),
    ("TOV", 0.05, -0.005, 0.008),
    ("STL", 0.03, 0.005, 0.006),
    ("BLK", 0.02, 0.005, 0.006),
    ("BLKA", 0.02, -0.002, 0.005),
    ("PF", 0.08, -0.005, 0.010),
    ("PTS", 0.40, 0.080, 0.040),
    ("PFD", 0.07, 0.010, 0.010),
    ("PMM", 0.00, 0.250, 0.050),
    ("CONTESTEDSHOTS", 0.25, 0.030, 0.030),
    ("CONTESTEDSHOTS2PT", 0.17, 0.020, 0.020),
    ("CONTESTEDSHOTS3PT", 0.08, 0.010, 0.010),
    ("CHARGESDRAWN", 0.003, 0.001, 0.002),
    ("DEFLECTIONS", 0.06, 0.010, 0.010),
    ("LOOSEBALLSRECOVERED", 0.03, 0.005, 0.006),
    ("SCREENASSISTS", 0.05, 0.010, 0.010),
    ("BOXOUTS", 0.10, 0.020, 0.015),
]

# (name, base, skill_loading, noise_sd, lo, hi) for the percentage stats.
_PCT_MODEL = [
    ("FGPCT", 0.46, 0.040, 0.040, 0.05, 0.95),
    ("FG3PCT", 0.34, 0.030, 0.050, 0.00, 0.95),
    ("FTPCT", 0.77, 0.040, 0.050, 0.20, 0.98),
]

# Rotation lineups as roster-index combinations; indices >= 8 never play,
# which exercises the minimum-minutes player filter downstream.
_POOL_TEMPLATE = [
    (0, 1, 2, 3, 4), (0, 1, 2, 3, 5), (0, 1, 2, 4, 5), (0, 1, 3, 4, 6),
    (0, 2, 3, 4, 6), (1, 2, 3, 4, 5), (0, 1, 2, 5, 6), (0, 1, 4, 5, 7),
    (0, 2, 3, 6, 7), (1, 2, 4, 6, 7), (0, 3, 4, 5, 7), (1, 3, 5, 6, 7),
    (2, 4, 5, 6, 7), (0, 1, 2, 3, 7), (0, 1, 3, 6, 7), (1, 2, 3, 5, 6),
    (0, 2, 4, 5, 6), (2, 3, 4, 5, 7), (0, 1, 4, 6, 7), (1, 2, 3, 4, 7),
]

_POINT_VALUES = np.array([1, 2, 3])
_POINT_PROBS = np.array([0.05, 0.70, 0.25])


@dataclass(frozen=True)
class SynthConfig:
    teams: int = 6
    games: int = 40
    roster_size: int = 9
    seed: int = 1
    game_seconds: int = 2880
    signal_scale: float = 1.5

    def validate(self):
        if min(self.teams, self.games, self.roster_size, self.seed,
               self.game_seconds) <= 0:
            raise ValueError("all synthetic-season config values must be positive")
        if self.teams < 2:
            raise ValueError("need at least 2 teams")
        if self.roster_size < 8:
            raise ValueError("rotation template needs roster_size >= 8")


@dataclass
class SynthResult:
    pbp_path: Path
    stats_path: Path
    truth_path: Path
    truth: dict


def _player_id(team: int, idx: int) -> str:
    return f"t{team:02d} p{idx:02d}"


def _team_name(team: int) -> str:
    return f"T{team:02d}"


def generate_synthetic_season(config: SynthConfig, out_dir: str | Path) -> SynthResult:
    config.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(config.seed)

    n_teams, roster = config.teams, config.roster_size
    skills = rng.normal(0.0, 1.0, size=(n_teams, roster))

    pool_size = len(_POOL_TEMPLATE)
    pool_weights = 1.0 / (1.0 + 0.05 * np.arange(pool_size))
    pool_weights /= pool_weights.sum()

    court_seconds = np.zeros((n_teams, roster))
    games: dict[str, dict] = {}
    pbp_rows: list[list[str]] = []

    for g in range(config.games):
        game_id = f"g{g:04d}"
        home, away = rng.choice(n_teams, size=2, replace=False)

        boundaries = []
        t = 0
        while True:
            t += int(rng.integers(180, 421))
            if t >= config.game_seconds:
                break
            boundaries.append(t)

        # Lineup schedule: draw from the rotation template at each boundary.
        def draw() -> tuple[int, ...]:
            return _POOL_TEMPLATE[int(rng.choice(pool_size, p=pool_weights))]

        segments = []  # (start, end, home_idx, away_idx)
        cur_h, cur_a = draw(), draw()
        start = 0
        for b in boundaries:
            nh = cur_h if rng.random() > 0.7 else draw()
            na = cur_a if rng.random() > 0.7 else draw()
            if nh == cur_h and na == cur_a:
                continue  # no substitution, stint continues
            segments.append((start, b, cur_h, cur_a))
            start, cur_h, cur_a = b, nh, na
        segments.append((start, config.game_seconds, cur_h, cur_a))

        stints = []
        n_events = 1  # opening row
        for s, e, hi, ai in segments:
            h_ids = sorted(_player_id(home, i) for i in hi)
            a_ids = sorted(_player_id(away, i) for i in ai)
            qh = sum(skills[home, i] for i in hi) / 5.0
            qa = sum(skills[away, i] for i in ai) / 5.0
            p_home = 1.0 / (1.0 + np.exp(-config.signal_scale * (qh - qa)))

            n_scores = int(rng.poisson((e - s) / 35.0))
            h_pts = a_pts = 0
            score_rows = []
            if e - s >= 2 and n_scores:
                times = np.sort(rng.integers(s + 1, e, size=n_scores))
                for tau in times:
                    pts = int(rng.choice(_POINT_VALUES, p=_POINT_PROBS))
                    if rng.random() < p_home:
                        h_pts += pts
                        score_rows.append((int(tau), h_ids, a_ids, pts, 0))
                    else:
                        a_pts += pts
                        score_rows.append((int(tau), h_ids, a_ids, 0, pts))

            for i in hi:
                court_seconds[home, i] += e - s
            for i in ai:
                court_seconds[away, i] += e - s
            stints.append({
                "start": s, "end": e, "home": h_ids, "away": a_ids,
                "home_points": h_pts, "away_points": a_pts,
            })

            if s == 0:
                pbp_rows.append([game_id, "0", *h_ids, *a_ids, "0", "0"])
            else:
                pbp_rows.append([game_id, str(s), *h_ids, *a_ids, "0", "0"])
                n_events += 1
            for tau, h_ids_r, a_ids_r, hp, ap in score_rows:
                pbp_rows.append([game_id, str(tau), *h_ids_r, *a_ids_r,
                                 str(hp), str(ap)])
            n_events += len(score_rows)

        # closing row pins the final stint's end at the buzzer
        last = stints[-1]
        pbp_rows.append([game_id, str(config.game_seconds),
                         *last["home"], *last["away"], "0", "0"])
        n_events += 1

        games[game_id] = {
            "home_team": _team_name(home),
            "away_team": _team_name(away),
            "length_seconds": config.game_seconds,
            "n_events": n_events,
            "final_home_diff": sum(st["home_points"] - st["away_points"]
                                   for st in stints),
            "stints": stints,
        }

    # Player stats: per-minute rates driven by the planted skill.
    players: dict[str, dict] = {}
    for team in range(n_teams):
        for i in range(roster):
            theta = float(skills[team, i])
            stats: dict[str, float] = {}
            for name, base, load, noise in _RATE_MODEL:
                v = base + load * theta + noise * float(rng.normal())
                stats[name] = v if name == "PMM" else max(0.0, v)
            for name, base, load, noise, lo, hi in _PCT_MODEL:
                v = base + load * theta + noise * float(rng.normal())
                stats[name] = float(np.clip(v, lo, hi))
            players[_player_id(team, i)] = {
                "team": _team_name(team),
                "skill": theta,
                "minutes": float(court_seconds[team, i]) / 60.0,
                "stats": stats,
            }

    # Independent lineup bookkeeping from the generator's own schedule.
    lineup_totals: dict[tuple[str, ...], list[float]] = {}
    for game_id in games:
        for st in games[game_id]["stints"]:
            secs = st["end"] - st["start"]
            diff = st["home_points"] - st["away_points"]
            for ids, signed in ((tuple(st["home"]), diff), (tuple(st["away"]), -diff)):
                acc = lineup_totals.setdefault(ids, [0, 0])
                acc[0] += secs
                acc[1] += signed
    lineups = [
        {
            "players": list(ids),
            "minutes": secs / 60.0,
            "point_diff": int(diff),
            "pmm": diff / (secs / 60.0),
            "label": "elite" if diff > 0 else "not_elite",
        }
        for ids, (secs, diff) in lineup_totals.items()
    ]

    truth = {
        "config": asdict(config),
        "players": players,
        "games": games,
        "lineups": lineups,
        "planted": _planted_metrics(lineups, players, config.signal_scale),
    }

    pbp_path = out_dir / "pbp.csv"
    with pbp_path.open("w", newline="") as fh:
        fh.write("game_id,elapsed_seconds,h1,h2,h3,h4,h5,a1,a2,a3,a4,a5,"
                 "home_pts,away_pts\n")
        for row in pbp_rows:
            fh.write(",".join(row) + "\n")

    from .ingest import STAT_NAMES

    stats_path = out_dir / "player_stats.csv"
    with stats_path.open("w", newline="") as fh:
        fh.write("player,team,minutes," + ",".join(STAT_NAMES) + "\n")
        for pid in sorted(players):
            rec = players[pid]
            cells = [pid, rec["team"], repr(rec["minutes"])]
            cells += [repr(rec["stats"][s]) for s in STAT_NAMES]
            fh.write(",".join(cells) + "\n")

    truth_path = out_dir / "ground_truth.json"
    truth_path.write_text(json.dumps(truth, sort_keys=True, indent=1))
    return SynthResult(pbp_path, stats_path, truth_path, truth)


def _planted_metrics(lineups: list[dict], players: dict[str, dict],
                     signal_scale: float) -> dict:
    """Prevalence and the precision of the planted skill-sum rule on the
    filtered lineup set (50-minute players, 25-minute lineups)."""
    eligible = {pid for pid, rec in players.items() if rec["minutes"] >= 50.0}
    kept = [lu for lu in lineups
            if lu["minutes"] >= 25.0 and all(p in eligible for p in lu["players"])]
    out = {
        "rule": "sum of planted player skills > 0",
        "signal_scale": signal_scale,
        "n_filtered_lineups": len(kept),
        "prevalence": None,
        "bayes_precision": None,
        "bayes_gap": None,
    }
    if not kept:
        return out
    prevalence = sum(lu["pmm"] > 0 for lu in kept) / len(kept)
    flagged = [lu for lu in kept
               if sum(players[p]["skill"] for p in lu["players"]) > 0]
    out["prevalence"] = prevalence
    if flagged:
        bayes = sum(lu["pmm"] > 0 for lu in flagged) / len(flagged)
        out["bayes_precision"] = bayes
        out["bayes_gap"] = bayes - prevalence
    return out
