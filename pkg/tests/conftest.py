"""Shared helpers: planted-signal datasets small enough for fast tests."""

import numpy as np

from lineup_anc.ensemble import EnsembleConfig
from lineup_anc.ingest import (Dataset, LineupObservation, PlayerSeasonStats,
                               STAT_NAMES, make_lineup)
from lineup_anc.subclassifiers import (BoostParams, ForestParams, KnnParams,
                                       LogitParams, SvmParams, TreeParams)


def planted_dataset(seed=0, n=80, n_players=40):
    """Dataset whose lineup outcomes follow the sum of planted player skills."""
    rng = np.random.default_rng(seed)
    players = {}
    for i in range(n_players):
        pid = f"p {i:02d}"
        skill = rng.normal()
        stats = {s: max(0.0, 0.2 + 0.05 * skill + 0.02 * rng.normal())
                 for s in STAT_NAMES}
        stats["PMM"] = 0.3 * skill + 0.02 * rng.normal()
        players[pid] = (PlayerSeasonStats(pid, "T", 100.0, stats), skill)
    obs = []
    seen = set()
    while len(obs) < n:
        ids = tuple(sorted(rng.choice(sorted(players), size=5, replace=False)))
        if ids in seen:
            continue
        seen.add(ids)
        quality = sum(players[p][1] for p in ids)
        diff = quality * 4 + rng.normal() * 3
        obs.append(LineupObservation.from_totals(make_lineup(ids), 30.0,
                                                 float(diff)))
    return Dataset(obs, {pid: rec for pid, (rec, _) in players.items()})


def fast_config(num_votes=7):
    return EnsembleConfig(
        tree=TreeParams(cp=0.05), forest=ForestParams(ntree=10, cutoff_c=0.5),
        boost=BoostParams(mfinal=5, maxdepth=2, cp=0.01),
        svm=SvmParams(cost=1.0, gamma=0.1), knn=KnnParams(k=3),
        logit=LogitParams(thresh=0.25), num_votes=num_votes)
