import numpy as np
import pytest

from airfoilgen import aero, gaopt
from airfoilgen.errors import (
    ConfigInvalid,
    DimensionMismatch,
    EvaluatorFailure,
    Unevaluated,
)


def sphere(z):
    return -float(np.dot(z, z))


class TestConfig:
    def test_defaults(self):
        cfg = gaopt.GaConfig()
        assert cfg.generations == 60
        assert cfg.population == 25
        assert cfg.tournament_size == 2
        assert cfg.targets == aero.FitnessTargets(0.6, 0.006)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"generations": 0},
            {"population": 1},
            {"mutation_probability": 1.5},
            {"mutation_probability": -0.1},
            {"mutation_scale": 0.0},
            {"elitism_count": 25},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ConfigInvalid):
            gaopt.GaConfig(**kwargs)


class TestOperators:
    def test_tournament_picks_better(self):
        pop = [
            gaopt.Individual(z=np.zeros(2), fitness=-5.0),
            gaopt.Individual(z=np.ones(2), fitness=-1.0),
        ]
        rng = np.random.default_rng(0)
        wins = sum(
            gaopt.tournament_select(pop, rng, 2) is pop[1] for _ in range(200)
        )
        # the better individual wins every mixed draw: P(win) = 3/4
        assert wins > 120

    def test_tournament_tie_lower_index(self):
        pop = [
            gaopt.Individual(z=np.zeros(2), fitness=-1.0),
            gaopt.Individual(z=np.ones(2), fitness=-1.0),
        ]

        class FixedRng:
            def integers(self, lo, hi, size):
                return np.array([1, 0])

        assert gaopt.tournament_select(pop, FixedRng(), 2) is pop[0]

    def test_tournament_unevaluated(self):
        pop = [gaopt.Individual(z=np.zeros(2))]
        with pytest.raises(Unevaluated):
            gaopt.tournament_select(pop, np.random.default_rng(0), 2)

    def test_crossover_swaps_tail(self):
        p1 = np.zeros(32)
        p2 = np.ones(32)
        rng = np.random.default_rng(1)
        c1, c2 = gaopt.crossover_single_point(p1, p2, rng)
        k = int(np.argmax(c1 == 1.0))
        assert 1 <= k <= 31
        np.testing.assert_array_equal(c1[:k], 0.0)
        np.testing.assert_array_equal(c1[k:], 1.0)
        np.testing.assert_array_equal(c1 + c2, 1.0)

    def test_crossover_point_never_degenerate(self):
        p1, p2 = np.zeros(32), np.ones(32)
        rng = np.random.default_rng(2)
        for _ in range(300):
            c1, _ = gaopt.crossover_single_point(p1, p2, rng)
            assert 0.0 in c1 and 1.0 in c1  # both parents contribute

    def test_crossover_shape_check(self):
        with pytest.raises(DimensionMismatch):
            gaopt.crossover_single_point(
                np.zeros(4), np.zeros(5), np.random.default_rng(0)
            )

    def test_mutate_probability_extremes(self):
        z = np.zeros(8)
        rng = np.random.default_rng(3)
        assert np.array_equal(gaopt.mutate(z, 0.0, 1.0, rng), z)
        mutated = gaopt.mutate(z, 1.0, 1.0, rng)
        assert not np.array_equal(mutated, z)

    def test_mutate_scale(self):
        z = np.zeros(1000)
        rng = np.random.default_rng(4)
        out = gaopt.mutate(z, 1.0, 0.2, rng)
        assert np.std(out) == pytest.approx(0.2, rel=0.1)


class TestRunGa:
    def test_requires_scoring_path(self):
        with pytest.raises(ConfigInvalid):
            gaopt.run_ga(gaopt.GaConfig(generations=1))

    def test_sphere_improves(self):
        cfg = gaopt.GaConfig(generations=30, population=20, seed=0)
        best, history = gaopt.run_ga(cfg, score_fn=sphere)
        assert len(history) == 30
        assert history[-1].best_fitness > history[0].best_fitness
        assert best.fitness > -10.0

    def test_best_overall_is_max(self):
        cfg = gaopt.GaConfig(generations=10, population=15, seed=1)
        best, history = gaopt.run_ga(cfg, score_fn=sphere)
        assert best.fitness == max(rec.best_fitness for rec in history)

    def test_elitism_monotone_best(self):
        cfg = gaopt.GaConfig(generations=15, population=12, seed=2, elitism_count=1)
        _, history = gaopt.run_ga(cfg, score_fn=sphere)
        bests = [rec.best_fitness for rec in history]
        assert all(b2 >= b1 for b1, b2 in zip(bests, bests[1:]))

    def test_deterministic(self):
        cfg = gaopt.GaConfig(generations=8, population=10, seed=5)
        b1, h1 = gaopt.run_ga(cfg, score_fn=sphere)
        b2, h2 = gaopt.run_ga(cfg, score_fn=sphere)
        np.testing.assert_array_equal(b1.z, b2.z)
        assert [r.best_fitness for r in h1] == [r.best_fitness for r in h2]

    def test_parallel_matches_serial(self):
        cfg = gaopt.GaConfig(generations=6, population=10, seed=7)
        b1, h1 = gaopt.run_ga(cfg, score_fn=sphere, parallelism=1)
        b2, h2 = gaopt.run_ga(cfg, score_fn=sphere, parallelism=4)
        np.testing.assert_array_equal(b1.z, b2.z)
        assert [r.best_fitness for r in h1] == [r.best_fitness for r in h2]

    def test_all_failures_raise(self):
        cfg = gaopt.GaConfig(generations=2, population=5, seed=0)
        with pytest.raises(EvaluatorFailure):
            gaopt.run_ga(cfg, score_fn=lambda z: gaopt.PENALTY_FITNESS)

    def test_with_decoder_and_panel(self, pinned_decoder_model):
        cfg = gaopt.GaConfig(generations=2, population=6, seed=3)
        best, history = gaopt.run_ga(
            cfg,
            decoder=pinned_decoder_model.decoder,
            evaluator=aero.eval_panel,
            scale=pinned_decoder_model.scale,
        )
        assert best.fitness is not None
        assert len(history) == 2
        assert best.cl is not None and best.cd is not None
        # the decoder output is latent-independent, so fitness is uniform
        fits = {ind.fitness for rec in history for ind in rec.individuals}
        assert len(fits) == 1

    def test_failed_individuals_get_penalty(self, pinned_decoder_model):
        calls = {"n": 0}
        real = aero.eval_panel

        def flaky(loop, cond):
            calls["n"] += 1
            if calls["n"] % 2 == 0:
                raise aero.DegenerateGeometry("synthetic failure")
            return real(loop, cond)

        cfg = gaopt.GaConfig(generations=1, population=4, seed=0)
        _, history = gaopt.run_ga(
            cfg,
            decoder=pinned_decoder_model.decoder,
            evaluator=flaky,
            scale=pinned_decoder_model.scale,
        )
        fits = [ind.fitness for ind in history[0].individuals]
        assert gaopt.PENALTY_FITNESS in fits
        assert any(f > gaopt.PENALTY_FITNESS for f in fits)

    def test_history_csv(self, tmp_path):
        cfg = gaopt.GaConfig(generations=4, population=8, seed=0)
        _, history = gaopt.run_ga(cfg, score_fn=sphere)
        path = tmp_path / "history.csv"
        gaopt.write_history_csv(path, history)
        lines = path.read_text().splitlines()
        assert lines[0] == "generation,best_fitness,mean_fitness,best_cl,best_cd"
        assert len(lines) == 5
        assert lines[1].startswith("0,")
