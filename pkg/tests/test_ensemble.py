import itertools

import numpy as np
import pytest

from lineup_anc import ELITE, NOT_ELITE
from lineup_anc.ensemble import (
    EnsembleConfig,
    GridSpec,
    TABLE6_CONFIG,
    TuningTable,
    anc_vote,
    efficient_frontier,
    fit_ensemble,
    make_folds,
    mini_grid,
    paper_grid,
    predict_ensemble,
    select_configuration,
)
from lineup_anc.ensemble import TunedEnsembleModel
from lineup_anc.subclassifiers import (BoostParams, ForestParams, KnnParams,
                                       LogitParams, SvmParams, TreeParams)


class TestAncVote:
    def test_unanimity(self):
        assert anc_vote([ELITE] * 7, 7) == ELITE

    def test_six_of_seven_fails_unanimity(self):
        assert anc_vote([ELITE] * 6 + [NOT_ELITE], 7) == NOT_ELITE

    def test_wrong_count_is_error(self):
        with pytest.raises(ValueError):
            anc_vote([ELITE] * 6, 7)

    def test_brute_force_all_patterns_and_thresholds(self):
        for pattern in itertools.product([ELITE, NOT_ELITE], repeat=7):
            votes = list(pattern)
            n_elite = votes.count(ELITE)
            previous_elite = None
            for v in range(1, 8):
                want = ELITE if n_elite >= v else NOT_ELITE
                got = anc_vote(votes, v)
                assert got == want
                if previous_elite is not None and got == ELITE:
                    # monotone: elite at threshold v implies elite at v-1
                    assert previous_elite == ELITE
                previous_elite = got


class TestMakeFolds:
    def test_even_split(self):
        a = make_folds(20, 10, seed=1)
        assert sorted(np.bincount(a).tolist()) == [2] * 10

    def test_remainder_split(self):
        a = make_folds(23, 10, seed=1)
        counts = sorted(np.bincount(a).tolist())
        assert counts == [2] * 7 + [3] * 3

    def test_determinism(self):
        assert np.array_equal(make_folds(57, 10, seed=3), make_folds(57, 10, seed=3))

    def test_too_small(self):
        with pytest.raises(ValueError):
            make_folds(9, 10, seed=0)


def oracle_frontier(points):
    """O(n^2) weak-dominance scan plus first-occurrence dedup."""
    kept = []
    seen = set()
    for i, p in enumerate(points):
        dominated = any(
            q[0] >= p[0] and q[1] >= p[1] and (q[0] > p[0] or q[1] > p[1])
            for j, q in enumerate(points) if j != i)
        if not dominated and p not in seen:
            kept.append(i)
            seen.add(p)
    return kept


class TestFrontier:
    def test_published_coordinates(self):
        pts = [(0.798, 0.50), (0.770, 0.667), (0.70, 0.60)]
        assert efficient_frontier(pts) == [0, 1]

    def test_single_point(self):
        assert efficient_frontier([(0.5, 0.5)]) == [0]

    def test_empty(self):
        assert efficient_frontier([]) == []

    def test_duplicates_keep_first(self):
        pts = [(0.8, 0.5), (0.8, 0.5), (0.7, 0.7)]
        assert efficient_frontier(pts) == [0, 2]

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_quadratic_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = 200
        pts = [(round(float(x), 3), round(float(y), 3))
               for x, y in rng.uniform(size=(n, 2))]
        assert efficient_frontier(pts) == oracle_frontier(pts)

    def test_mutual_non_domination(self):
        rng = np.random.default_rng(99)
        pts = [tuple(map(float, p)) for p in rng.uniform(size=(100, 2))]
        front = efficient_frontier(pts)
        for i in front:
            for j in front:
                if i != j:
                    p, q = pts[i], pts[j]
                    assert not (q[0] >= p[0] and q[1] >= p[1]
                                and (q[0] > p[0] or q[1] > p[1]))


def tiny_grid(n_tree=3):
    return GridSpec(
        tree=tuple(TreeParams(cp=c) for c in (-1, 0.05, 1.0)[:n_tree]),
        forest=(ForestParams(ntree=5),),
        boost=(BoostParams(mfinal=3, maxdepth=1),),
        svm=(SvmParams(cost=1.0, gamma=0.5),),
        knn=(KnnParams(k=3),),
        logit=(LogitParams(thresh=0.25),),
        num_votes=(7,),
    )


def synthetic_table(stats):
    """Build a TuningTable carrying only aggregate numbers.
    stats: list of (avg, min, sd) or None for NA rows."""
    grid = tiny_grid(len(stats))
    n = len(stats)
    avg = np.full((n, 1), np.nan)
    mn = np.full((n, 1), np.nan)
    sd = np.full((n, 1), np.nan)
    na = np.zeros((n, 1), dtype=bool)
    for i, rec in enumerate(stats):
        if rec is None:
            na[i, 0] = True
        else:
            avg[i, 0], mn[i, 0], sd[i, 0] = rec
    acc = np.full((n, 1), 0.5)
    return TuningTable(grid, "full_140", 10, 0, avg, mn, sd, acc, na,
                       [grid.fits_per_fold()] * 10, np.zeros(1, dtype=int), [])


class TestSelectConfiguration:
    def test_floor_prefers_reliable_point(self):
        table = synthetic_table([(0.798, 0.50, 0.2), (0.770, 0.667, 0.1),
                                 (0.70, 0.60, 0.1)])
        cfg = select_configuration(table, "min_precision_floor", floor=0.6)
        assert cfg.tree.cp == 0.05  # second combo

    def test_floor_zero_is_max_avg(self):
        table = synthetic_table([(0.798, 0.50, 0.2), (0.770, 0.667, 0.1)])
        cfg = select_configuration(table, "min_precision_floor", floor=0.0)
        assert cfg.tree.cp == -1  # first combo

    def test_infeasible_floor_reports_achievable(self):
        table = synthetic_table([(0.798, 0.50, 0.2), (0.770, 0.667, 0.1)])
        with pytest.raises(ValueError, match="0.6670"):
            select_configuration(table, "min_precision_floor", floor=0.9)

    def test_interactive_index_walks_frontier(self):
        table = synthetic_table([(0.798, 0.50, 0.2), (0.770, 0.667, 0.1),
                                 (0.70, 0.60, 0.1)])
        first = select_configuration(table, "interactive_index", index=0)
        second = select_configuration(table, "interactive_index", index=1)
        assert first.tree.cp == -1
        assert second.tree.cp == 0.05
        with pytest.raises(ValueError, match="2 points"):
            select_configuration(table, "interactive_index", index=2)

    def test_na_rows_excluded(self):
        table = synthetic_table([None, (0.5, 0.4, 0.1)])
        cfg = select_configuration(table, "max_avg")
        assert cfg.tree.cp == 0.05

    def test_all_na_is_error(self):
        table = synthetic_table([None, None])
        with pytest.raises(ValueError):
            select_configuration(table, "max_avg")


class TestGridSpecs:
    def test_paper_grid_cardinality(self):
        grid = paper_grid()
        assert grid.base_shape == (9, 4, 12, 9, 3, 3)
        assert grid.n_base == 34992
        assert grid.n_total == 244944
        assert grid.fits_per_fold() == 9 + 4 + 12 + 9 + 3 + 3 + 1

    def test_mini_grid_within_budget(self):
        grid = mini_grid()
        assert grid.n_total <= 128
        threshes = {p.thresh for p in grid.logit}
        assert 0.05 in threshes
        assert 7 in grid.num_votes

    def test_table6_values(self):
        cfg = TABLE6_CONFIG
        assert (cfg.tree.cp, cfg.tree.loss_fp) == (0.05, 1.0)
        assert (cfg.forest.cutoff_c, cfg.forest.ntree) == (0.7, 500)
        assert (cfg.boost.mfinal, cfg.boost.maxdepth, cfg.boost.cp) == (500, 3, 0.01)
        assert (cfg.svm.cost, cfg.svm.gamma) == (1.0, 1.0)
        assert cfg.knn.k == 7
        assert cfg.logit.thresh == 0.25
        assert cfg.num_votes == 7

    def test_config_round_trip(self):
        cfg = TABLE6_CONFIG
        assert EnsembleConfig.from_dict(cfg.to_dict()) == cfg


from conftest import fast_config, planted_dataset


class TestFitPredictEnsemble:
    def test_refit_same_seed_byte_identical(self):
        ds = planted_dataset(1)
        a = fit_ensemble(ds, fast_config(), seed=11)
        b = fit_ensemble(ds, fast_config(), seed=11)
        assert a.to_json() == b.to_json()

    def test_vote_panel_and_threshold_semantics(self):
        ds = planted_dataset(2)
        model = fit_ensemble(ds, fast_config(), seed=3)
        from lineup_anc.features import vector_for_observation
        vec = vector_for_observation(ds.observations[0], ds.feature_source)
        result = predict_ensemble(model, vec)
        assert len(result["votes"]) == 7
        assert result["label"] == anc_vote(result["votes"], 7)

    def test_elite_set_monotone_in_num_votes(self):
        ds = planted_dataset(3, n=100)
        model = fit_ensemble(ds, fast_config(), seed=5)
        from lineup_anc.features import dataset_vectors
        vectors = dataset_vectors(ds, model.config.feature_mode)
        votes = model.vote_matrix(model.prepare(vectors))
        counts = votes.sum(axis=1)
        previous = None
        for v in range(1, 8):
            elite_set = set(np.flatnonzero(counts >= v))
            if previous is not None:
                assert elite_set <= previous
            previous = elite_set

    def test_labels_match_external_anc_vote(self):
        ds = planted_dataset(4)
        model = fit_ensemble(ds, fast_config(num_votes=5), seed=7)
        from lineup_anc.features import dataset_vectors
        vectors = dataset_vectors(ds, model.config.feature_mode)
        labels, votes = model.predict_vectors(vectors)
        for label, panel in zip(labels, votes):
            assert label == anc_vote(panel, 5)

    def test_model_file_round_trip(self, tmp_path):
        ds = planted_dataset(5)
        model = fit_ensemble(ds, fast_config(), seed=9)
        path = tmp_path / "model.json"
        model.save(path)
        clone = TunedEnsembleModel.load(path)
        assert clone.to_json() == model.to_json()
        from lineup_anc.features import dataset_vectors
        vectors = dataset_vectors(ds, model.config.feature_mode)
        assert clone.predict_vectors(vectors) == model.predict_vectors(vectors)

    def test_dimension_mismatch_is_error(self):
        ds = planted_dataset(8)
        model = fit_ensemble(ds, fast_config(), seed=2)
        from lineup_anc.features import FeatureVector
        bad = FeatureVector(np.zeros(17), ds.observations[0].lineup)
        with pytest.raises(ValueError, match="dimension mismatch"):
            predict_ensemble(model, bad)

    def test_table6_config_fits_on_synthetic_lineups(self):
        # heavier forest/boost settings; small n keeps this quick
        ds = planted_dataset(6, n=60)
        cfg = EnsembleConfig(
            tree=TABLE6_CONFIG.tree,
            forest=ForestParams(ntree=50, cutoff_c=0.7),
            boost=BoostParams(mfinal=25, maxdepth=3, cp=0.01),
            svm=TABLE6_CONFIG.svm, knn=TABLE6_CONFIG.knn,
            logit=TABLE6_CONFIG.logit, num_votes=7)
        model = fit_ensemble(ds, cfg, seed=1)
        from lineup_anc.features import dataset_vectors
        labels, _ = model.predict_vectors(dataset_vectors(ds, cfg.feature_mode))
        assert set(labels) <= {ELITE, NOT_ELITE}
