"""Read-only JSON service over a trained model: vote panels and roster depth
for the what-if explorer. Stateless between requests."""

from __future__ import annotations

from itertools import combinations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import ELITE, __version__
from .ensemble import FAMILIES, TunedEnsembleModel
from .features import order_statistics
from .ingest import PlayerSeasonStats, STAT_NAMES, make_lineup, normalize_player_name

MIN_PRIOR_MINUTES = 50.0


class PredictRequest(BaseModel):
    players: list[str]


class RosterRequest(BaseModel):
    players: list[str]


def _vote_panel(votes: list[str]) -> list[dict]:
    return [{"family": f, "vote": v} for f, v in zip(FAMILIES, votes)]


def create_app(model: TunedEnsembleModel,
               stats: dict[str, PlayerSeasonStats]) -> FastAPI:
    app = FastAPI(title="lineup-anc", version=__version__)
    eligible = {pid: rec for pid, rec in stats.items()
                if rec.total_minutes >= MIN_PRIOR_MINUTES}

    def resolve_players(raw: list[str], expect: int | None) -> list[str]:
        if expect is not None and len(raw) != expect:
            raise HTTPException(422, f"expected {expect} players, "
                                     f"got {len(raw)}")
        ids = []
        for name in raw:
            pid = normalize_player_name(name)
            if pid not in stats:
                raise HTTPException(422, f"unknown player: {name}")
            if pid not in eligible:
                raise HTTPException(422, f"player not eligible "
                                         f"(insufficient prior minutes): {name}")
            ids.append(pid)
        if len(set(ids)) != len(ids):
            raise HTTPException(422, "players must be distinct")
        return ids

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/model")
    def model_info():
        return {
            "config": model.config.to_dict(),
            "num_votes": model.config.num_votes,
            "feature_mode": model.config.feature_mode,
            "feature_names": model.feature_names,
            "families": list(FAMILIES),
            "n_train": model.n_train,
        }

    @app.get("/players")
    def players():
        return {
            "players": [
                {"id": pid, "team": rec.team, "minutes": rec.total_minutes,
                 "pmm": rec.pmm}
                for pid, rec in sorted(eligible.items())
            ]
        }

    @app.post("/predict")
    def predict(req: PredictRequest):
        ids = resolve_players(req.players, expect=5)
        lineup = make_lineup(ids)
        vector = order_statistics(lineup, stats)
        labels, votes = model.predict_vectors([vector])
        order_stats = {
            stat: sorted(stats[p].stats[stat] for p in lineup)
            for stat in STAT_NAMES
        }
        return {"players": list(lineup), "label": labels[0],
                "votes": _vote_panel(votes[0]), "order_stats": order_stats}

    @app.post("/roster")
    def roster(req: RosterRequest):
        ids = resolve_players(req.players, expect=None)
        if len(ids) < 5:
            raise HTTPException(422, "need at least 5 players")
        lineups = [make_lineup(c) for c in combinations(sorted(ids), 5)]
        vectors = [order_statistics(lu, stats) for lu in lineups]
        labels, votes = model.predict_vectors(vectors)
        elite = [
            {"players": list(lu), "votes": _vote_panel(panel)}
            for lu, label, panel in zip(lineups, labels, votes)
            if label == ELITE
        ]
        return {"n_players": len(ids), "n_lineups": len(lineups),
                "elite_count": len(elite), "elite": elite}

    return app
