"""Genetic algorithm over 32-dimensional latent vectors, driven by an
aerodynamic evaluator (or an analytic surrogate score for testing)."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry, vaegan
from .aero import (
    AeroResult,
    FitnessTargets,
    FlowConditions,
    PENALTY_FITNESS,
    fitness_of_result,
)
from .errors import (
    AirfoilGenError,
    ConfigInvalid,
    DimensionMismatch,
    EvaluatorFailure,
    Unevaluated,
)

LATENT_DIM = vaegan.LATENT_DIM


@dataclass
class GaConfig:
    generations: int = 60
    population: int = 25
    mutation_probability: float = 0.3
    mutation_scale: float = 0.2  # set to 1.0 for literal unit-variance noise
    tournament_size: int = 2
    elitism_count: int = 1  # set to 0 for literal no-elitism behavior
    seed: int = 0
    targets: FitnessTargets = field(
        default_factory=lambda: FitnessTargets(0.6, 0.006)
    )

    def __post_init__(self):
        if self.generations < 1:
            raise ConfigInvalid(f"generations {self.generations} < 1")
        if self.population < 2:
            raise ConfigInvalid(f"population {self.population} < 2")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ConfigInvalid(f"mutation probability {self.mutation_probability}")
        if self.mutation_scale <= 0:
            raise ConfigInvalid(f"mutation scale {self.mutation_scale}")
        if self.elitism_count < 0 or self.elitism_count >= self.population:
            raise ConfigInvalid(f"elitism count {self.elitism_count}")


@dataclass
class Individual:
    z: np.ndarray
    fitness: float | None = None
    cl: float | None = None
    cd: float | None = None


@dataclass
class GenerationRecord:
    index: int
    individuals: list[Individual]
    best_fitness: float
    mean_fitness: float


def tournament_select(
    pop: list[Individual], rng: np.random.Generator, tournament_size: int = 2
) -> Individual:
    """Best of `tournament_size` uniform draws with replacement; ties go to
    the lower population index."""
    if not pop:
        raise Unevaluated("empty population")
    draws = rng.integers(0, len(pop), size=tournament_size)
    best = None
    for idx in draws:
        ind = pop[idx]
        if ind.fitness is None:
            raise Unevaluated(f"individual {idx} has no fitness")
        if best is None or ind.fitness > best[1] or (
            ind.fitness == best[1] and idx < best[0]
        ):
            best = (idx, ind.fitness)
    return pop[best[0]]


def crossover_single_point(
    p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    if p1.shape != p2.shape:
        raise DimensionMismatch(f"{p1.shape} vs {p2.shape}")
    d = p1.shape[0]
    k = int(rng.integers(1, d))
    c1 = np.concatenate([p1[:k], p2[k:]])
    c2 = np.concatenate([p2[:k], p1[k:]])
    return c1, c2


def mutate(
    z: np.ndarray, p: float, sigma: float, rng: np.random.Generator
) -> np.ndarray:
    if rng.random() < p:
        return z + sigma * rng.standard_normal(z.shape[0])
    return z


def decoded_loop(
    decoder, z: np.ndarray, scale: float, grid: geometry.CosineGrid
) -> np.ndarray:
    """Decode a latent vector to a denormalized Selig coordinate loop."""
    y = vaegan.decode(decoder, z[None, :])[0] / scale
    upper, lower = geometry.split_surfaces(y)
    return geometry.loop_coordinates(upper, lower, grid.xs)


def run_ga(
    config: GaConfig,
    decoder=None,
    evaluator=None,
    scale: float = 1.0,
    cond: FlowConditions | None = None,
    score_fn=None,
    parallelism: int = 1,
) -> tuple[Individual, list[GenerationRecord]]:
    """Evolve latent vectors toward the target coefficients.

    `evaluator(loop, cond) -> AeroResult` scores decoded airfoils; pass
    `score_fn(z) -> fitness` instead to bypass decoding and aerodynamics
    entirely (used by the deterministic surrogate tests). Failed evaluations
    receive the convergence penalty; a generation where every individual
    fails raises EvaluatorFailure.
    """
    if score_fn is None and (decoder is None or evaluator is None):
        raise ConfigInvalid("need either score_fn or decoder+evaluator")
    cond = cond or FlowConditions()
    grid = geometry.cosine_grid(geometry.DEFAULT_M)

    def evaluate_one(gen_idx: int, idx: int, ind: Individual) -> Individual:
        if ind.fitness is not None:
            return ind
        if score_fn is not None:
            return replace(ind, fitness=float(score_fn(ind.z)))
        try:
            loop = decoded_loop(decoder, ind.z, scale, grid)
            result = evaluator(loop, cond)
        except AirfoilGenError:
            result = AeroResult(np.nan, np.nan, converged=False, source="failed")
        return replace(
            ind,
            fitness=fitness_of_result(result, config.targets),
            cl=result.cl if result.converged else None,
            cd=result.cd if result.converged else None,
        )

    init_rng = np.random.default_rng(config.seed)
    pop = [
        Individual(z=init_rng.standard_normal(LATENT_DIM))
        for _ in range(config.population)
    ]

    history: list[GenerationRecord] = []
    best_overall: Individual | None = None

    for gen in range(config.generations):
        if parallelism > 1:
            with ThreadPoolExecutor(max_workers=parallelism) as pool:
                pop = list(
                    pool.map(
                        evaluate_one,
                        [gen] * len(pop),
                        range(len(pop)),
                        pop,
                    )
                )
        else:
            pop = [evaluate_one(gen, i, ind) for i, ind in enumerate(pop)]

        fitnesses = np.array([ind.fitness for ind in pop])
        if np.all(fitnesses <= PENALTY_FITNESS):
            raise EvaluatorFailure(f"every individual failed in generation {gen}")
        best_idx = int(np.argmax(fitnesses))
        history.append(
            GenerationRecord(
                index=gen,
                individuals=pop,
                best_fitness=float(fitnesses[best_idx]),
                mean_fitness=float(fitnesses.mean()),
            )
        )
        if best_overall is None or pop[best_idx].fitness > best_overall.fitness:
            best_overall = pop[best_idx]

        if gen == config.generations - 1:
            break

        ops_rng = np.random.default_rng([config.seed, gen])
        order = np.argsort(-fitnesses, kind="stable")
        next_pop = [pop[i] for i in order[: config.elitism_count]]
        while len(next_pop) < config.population:
            p1 = tournament_select(pop, ops_rng, config.tournament_size)
            p2 = tournament_select(pop, ops_rng, config.tournament_size)
            c1, c2 = crossover_single_point(p1.z, p2.z, ops_rng)
            for child in (c1, c2):
                if len(next_pop) >= config.population:
                    break
                z = mutate(
                    child,
                    config.mutation_probability,
                    config.mutation_scale,
                    ops_rng,
                )
                next_pop.append(Individual(z=z))
        pop = next_pop

    return best_overall, history


def write_history_csv(path, history: list[GenerationRecord]) -> None:
    with open(path, "w") as fh:
        fh.write("generation,best_fitness,mean_fitness,best_cl,best_cd\n")
        for rec in history:
            fitnesses = [ind.fitness for ind in rec.individuals]
            best = rec.individuals[int(np.argmax(fitnesses))]
            cl = "" if best.cl is None else repr(best.cl)
            cd = "" if best.cd is None else repr(best.cd)
            fh.write(
                f"{rec.index},{rec.best_fitness!r},{rec.mean_fitness!r},{cl},{cd}\n"
            )
