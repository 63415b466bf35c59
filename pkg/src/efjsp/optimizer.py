"""Hybrid discrete particle swarm / differential evolution solver.

Each particle carries a chromosome position, its objectives, and a
personal best.  One iteration builds a learning exemplar for every
particle from the personal bests of its ring neighbours via differential
mutation and crossover, rotates a random segment of the particle's own
operation sequence (inertia), and fuses rotated position, exemplar and an
archive member into a candidate by a three-parent job-subset merge.  The
candidate replaces the rotated position only when it dominates it.  A
variable neighbourhood search then refines the five best particles, and
all points evaluated during the iteration feed an elitist bounded
archive.

Randomness is drawn in a fixed order and worker results are applied in a
deterministic barrier phase, so runs reproduce exactly for a given seed
regardless of the thread count.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import local_search as _local
from .encoding import (
    MODE_PARTIAL,
    MODE_TOTAL,
    RULE_MIN_ENERGY,
    RULE_MIN_TIME,
    Chromosome,
    build_message_matrix,
    evaluate,
    heuristic_chromosome,
    random_chromosome,
)
from .model import ProblemInstance

Objectives = tuple[int, float]


def dominates(a, b) -> bool:
    """Strict Pareto dominance for minimisation: a is nowhere worse and
    somewhere better than b."""
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def crowding_distances(points: list[tuple[float, ...]]) -> list[float]:
    """Crowding distance of every point; boundary points get infinity."""
    n = len(points)
    if n == 0:
        return []
    if n <= 2:
        return [math.inf] * n
    dist = [0.0] * n
    m = len(points[0])
    for obj in range(m):
        order = sorted(range(n), key=lambda i: points[i][obj])
        dist[order[0]] = dist[order[-1]] = math.inf
        span = points[order[-1]][obj] - points[order[0]][obj]
        if span <= 0:
            continue
        for k in range(1, n - 1):
            if dist[order[k]] == math.inf:
                continue
            gap = points[order[k + 1]][obj] - points[order[k - 1]][obj]
            dist[order[k]] += gap / span
    return dist


def nondominated_ranks(points: list[tuple[float, ...]]) -> list[int]:
    """Front index of every point under fast non-dominated sorting."""
    n = len(points)
    ranks = [-1] * n
    remaining = set(range(n))
    level = 0
    while remaining:
        front = [
            i
            for i in remaining
            if not any(dominates(points[j], points[i]) for j in remaining if j != i)
        ]
        for i in front:
            ranks[i] = level
        remaining -= set(front)
        level += 1
    return ranks


@dataclass
class ArchiveEntry:
    chromosome: Chromosome
    cmax: int
    tec: float

    @property
    def objectives(self) -> Objectives:
        return (self.cmax, self.tec)


class ParetoArchive:
    """Bounded elitist store of mutually non-dominated solutions.

    New entries are rejected when dominated by, or equal in objectives
    to, an existing member; accepted entries evict everything they
    dominate.  Above capacity, the member with the smallest crowding
    distance is dropped; boundary members are never dropped.
    """

    def __init__(self, capacity: int = 100):
        if capacity < 1:
            raise ValueError("archive capacity must be positive")
        self.capacity = capacity
        self.entries: list[ArchiveEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, chromosome: Chromosome, objectives: Objectives) -> bool:
        c, t = objectives
        for e in self.entries:
            if (e.cmax == c and e.tec == t) or dominates(e.objectives, objectives):
                return False
        self.entries = [
            e for e in self.entries if not dominates(objectives, e.objectives)
        ]
        self.entries.append(ArchiveEntry(chromosome, c, t))
        while len(self.entries) > self.capacity:
            self._evict_one()
        return True

    def _evict_one(self) -> None:
        pts = [e.objectives for e in self.entries]
        dist = crowding_distances(pts)
        finite = [i for i, d in enumerate(dist) if d != math.inf]
        if finite:
            victim = min(finite, key=lambda i: dist[i])
        else:
            victim = len(self.entries) - 1
        del self.entries[victim]

    def points(self) -> list[Objectives]:
        """Objective points sorted by (makespan, energy)."""
        return sorted(e.objectives for e in self.entries)

    def sample(self, rng: random.Random) -> ArchiveEntry:
        return self.entries[rng.randrange(len(self.entries))]


@dataclass
class Particle:
    position: Chromosome
    objectives: Objectives
    pbest: Chromosome
    pbest_objectives: Objectives


@dataclass
class AlgorithmConfig:
    """Tunables of the solver loop."""

    population: int = 30
    max_iter: int = 300
    scale_factor: float = 0.5
    crossover_rate: float = 0.3
    archive_capacity: int = 100
    vns_budget: int = 20
    disable_hybrid_init: bool = False
    disable_de: bool = False
    disable_vns: bool = False
    seed: int = 0
    threads: int = 1

    def __post_init__(self) -> None:
        if self.population < 3:
            raise ValueError("population must be at least 3")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")
        if not 0.0 <= self.scale_factor <= 1.0:
            raise ValueError("scale_factor must lie in [0, 1]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if self.archive_capacity < 1:
            raise ValueError("archive_capacity must be positive")
        if self.vns_budget < 0:
            raise ValueError("vns_budget must be non-negative")
        if self.threads < 1:
            raise ValueError("threads must be positive")


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    best_cmax: int
    best_tec: float
    archive_points: tuple[Objectives, ...]


@dataclass(frozen=True)
class RunResult:
    archive: ParetoArchive
    trace: tuple[IterationStats, ...]


def initialize_population(
    inst: ProblemInstance,
    cfg: AlgorithmConfig,
    rng: random.Random,
    matrices=None,
) -> list[Particle]:
    """Seed the swarm: 40% time-greedy, 40% energy-greedy, rest random.

    Each greedy block holds exactly one fully greedy chromosome, the
    remainder mixing best and second-best columns per operation.  With
    hybrid seeding disabled the whole population is random.  Every
    particle starts with itself as personal best.
    """
    if matrices is None:
        matrices = build_message_matrix(inst)
    n = cfg.population
    if cfg.disable_hybrid_init:
        n1 = n2 = 0
    else:
        n1 = n2 = (2 * n) // 5
    chroms: list[Chromosome] = []
    for rule, count in ((RULE_MIN_TIME, n1), (RULE_MIN_ENERGY, n2)):
        for k in range(count):
            mode = MODE_TOTAL if k == 0 else MODE_PARTIAL
            chroms.append(heuristic_chromosome(inst, rule, mode, rng, matrices))
    while len(chroms) < n:
        chroms.append(random_chromosome(inst, rng))
    particles = []
    for ch in chroms:
        obj = evaluate(inst, ch, matrices)
        particles.append(Particle(ch, obj, ch, obj))
    return particles


def de_mutate(
    prev: Chromosome,
    current: Chromosome,
    nxt: Chromosome,
    scale_factor: float,
    rng: random.Random,
) -> Chromosome:
    """Differential mutation on the machine-column vector.

    Wherever the two neighbours agree, the current entry is replaced by
    the agreed value with probability ``scale_factor``; everywhere else
    it is kept.  The operation sequence passes through untouched.
    """
    mv = list(current.mv)
    for p, (a, b) in enumerate(zip(prev.mv, nxt.mv)):
        if a == b and rng.random() < scale_factor:
            mv[p] = a
    return Chromosome(current.os, tuple(mv))


def de_crossover(
    mutant: Chromosome,
    base: Chromosome,
    crossover_rate: float,
    rng: random.Random,
) -> Chromosome:
    """Binomial crossover of the machine-column vectors.

    Each position takes the mutant entry with probability
    ``crossover_rate``; one uniformly chosen position always does, so the
    exemplar never collapses onto the base.
    """
    d = len(base.mv)
    forced = rng.randrange(d)
    mv = [
        mutant.mv[p] if (rng.random() < crossover_rate or p == forced) else base.mv[p]
        for p in range(d)
    ]
    return Chromosome(base.os, tuple(mv))


def self_rotate(chrom: Chromosome, rng: random.Random) -> Chromosome:
    """Rotate a random os segment one step: its last entry moves to its front."""
    d = len(chrom.os)
    if d < 2:
        return chrom
    a, b = sorted(rng.sample(range(d), 2))
    os = list(chrom.os)
    os[a : b + 1] = [os[b]] + os[a:b]
    return Chromosome(tuple(os), chrom.mv)


def subset_sizes(w1: float, w2: float, w3: float, n_jobs: int) -> tuple[int, int, int]:
    """Split ``n_jobs`` into three parts proportional to the weights.

    The first two parts round down against the cumulative weight shares;
    the third takes the remainder.
    """
    total = w1 + w2 + w3
    if total <= 0:
        raise ValueError("weights must sum to a positive value")
    n1 = math.floor(w1 * n_jobs / total)
    n12 = math.floor((w1 + w2) * n_jobs / total)
    return n1, n12 - n1, n_jobs - n12


def fuse_parents(
    order: tuple[tuple[int, int], ...],
    p1: Chromosome,
    p2: Chromosome,
    p3: Chromosome,
    subset1: set[int],
    subset2: set[int],
    subset3: set[int],
) -> Chromosome:
    """Merge three parents along a job partition.

    Jobs of the first subset keep their positions from the first parent.
    The remaining positions are then filled front to back: first with the
    second subset's entries in the second parent's order, then with the
    third subset's entries in the third parent's order.  Machine columns
    are taken per operation from the parent owning the job's subset.
    """
    d = len(p1.os)
    os: list[int] = [0] * d
    taken = [False] * d
    for idx, job in enumerate(p1.os):
        if job in subset1:
            os[idx] = job
            taken[idx] = True
    fill = [j for j in p2.os if j in subset2] + [j for j in p3.os if j in subset3]
    it = iter(fill)
    for idx in range(d):
        if not taken[idx]:
            os[idx] = next(it)
    mv = []
    for pos, (job, _) in enumerate(order):
        parent = p1 if job in subset1 else p2 if job in subset2 else p3
        mv.append(parent.mv[pos])
    return Chromosome(tuple(os), tuple(mv))


def weighted_fusion(
    inst: ProblemInstance,
    p1: Chromosome,
    p2: Chromosome,
    p3: Chromosome,
    weights: tuple[float, float, float],
    rng: random.Random,
    order: tuple[tuple[int, int], ...] | None = None,
) -> Chromosome:
    """Three-parent fusion over a random weight-proportional job partition."""
    from .encoding import canonical_order

    if order is None:
        order = canonical_order(inst)
    jobs = [job.id for job in inst.jobs]
    n1, n2, _ = subset_sizes(*weights, len(jobs))
    shuffled = rng.sample(jobs, len(jobs))
    s1 = set(shuffled[:n1])
    s2 = set(shuffled[n1 : n1 + n2])
    s3 = set(shuffled[n1 + n2 :])
    return fuse_parents(order, p1, p2, p3, s1, s2, s3)


def inertia_weight(iteration: int, max_iter: int) -> float:
    """Linearly falling inertia weight, from 2 down to 0.4."""
    return 2.0 - iteration * 1.6 / max_iter


def learning_factors(
    iteration: int, max_iter: int, rng: random.Random
) -> tuple[float, float]:
    """Randomised cognitive/social factors, clamped to [1.5, 2].

    The cognitive factor decays and the social factor grows over the run;
    each is perturbed by an independent uniform draw from (0, 1].
    """
    u1 = 1.0 - rng.random()
    c1 = 2.0 - iteration * 0.5 / (max_iter * u1)
    u2 = 1.0 - rng.random()
    c2 = 1.5 + iteration * 0.5 / (max_iter * u2)
    clamp = lambda c: min(2.0, max(1.5, c))
    return clamp(c1), clamp(c2)


def update_position(
    position: Chromosome,
    exemplar: Chromosome,
    gbest: Chromosome,
    iteration: int,
    cfg: AlgorithmConfig,
    rng: random.Random,
    inst: ProblemInstance,
    order: tuple[tuple[int, int], ...] | None = None,
) -> tuple[Chromosome, Chromosome]:
    """One particle move: returns (rotated position, fused candidate).

    The rotated position is the inertia baseline; the candidate fuses it
    with the exemplar and the archive draw under weights (inertia,
    cognitive * r1, social * r2).
    """
    w = inertia_weight(iteration, cfg.max_iter)
    c1, c2 = learning_factors(iteration, cfg.max_iter, rng)
    rotated = self_rotate(position, rng)
    r1 = rng.random()
    r2 = rng.random()
    candidate = weighted_fusion(
        inst, rotated, exemplar, gbest, (w, c1 * r1, c2 * r2), rng, order
    )
    return rotated, candidate


def select(
    current: tuple[Chromosome, Objectives],
    candidate: tuple[Chromosome, Objectives],
) -> tuple[Chromosome, Objectives]:
    """Keep the candidate only when it dominates the current position."""
    if dominates(candidate[1], current[1]):
        return candidate
    return current


def _top_indices(particles: list[Particle], count: int) -> list[int]:
    pts = [p.objectives for p in particles]
    ranks = nondominated_ranks(pts)
    dist = crowding_distances(pts)
    ordered = sorted(range(len(particles)), key=lambda i: (ranks[i], -dist[i], i))
    return ordered[:count]


def run(inst: ProblemInstance, cfg: AlgorithmConfig) -> RunResult:
    """Full solver loop; returns the final archive and a per-iteration trace."""
    rng = random.Random(cfg.seed)
    matrices = build_message_matrix(inst)
    from .encoding import canonical_order

    order = canonical_order(inst)
    pool = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None

    def eval_many(chroms: list[Chromosome]) -> list[Objectives]:
        fn = lambda ch: evaluate(inst, ch, matrices)
        if pool is None:
            return [fn(ch) for ch in chroms]
        return list(pool.map(fn, chroms))

    try:
        particles = initialize_population(inst, cfg, rng, matrices)
        archive = ParetoArchive(cfg.archive_capacity)
        for p in particles:
            archive.add(p.position, p.objectives)
        trace: list[IterationStats] = []
        n = len(particles)
        for it in range(1, cfg.max_iter + 1):
            plans: list[tuple[Chromosome, Chromosome]] = []
            for i, part in enumerate(particles):
                if cfg.disable_de or n < 3:
                    exemplar = part.pbest
                else:
                    mutant = de_mutate(
                        particles[i - 1].pbest,
                        part.pbest,
                        particles[(i + 1) % n].pbest,
                        cfg.scale_factor,
                        rng,
                    )
                    exemplar = de_crossover(
                        mutant, part.pbest, cfg.crossover_rate, rng
                    )
                gbest = archive.sample(rng).chromosome
                plans.append(
                    update_position(
                        part.position, exemplar, gbest, it, cfg, rng, inst, order
                    )
                )

            flat = [ch for pair in plans for ch in pair]
            objs = eval_many(flat)
            evaluated: list[tuple[Chromosome, Objectives]] = list(zip(flat, objs))
            for i, part in enumerate(particles):
                rotated, candidate = plans[i]
                part.position, part.objectives = select(
                    (rotated, objs[2 * i]), (candidate, objs[2 * i + 1])
                )

            if not cfg.disable_vns and cfg.vns_budget > 0:
                idxs = _top_indices(particles, 5)
                seeds = [rng.getrandbits(64) for _ in idxs]
                jobs = [
                    (particles[i].position, particles[i].objectives, random.Random(s))
                    for i, s in zip(idxs, seeds)
                ]
                vns_fn = lambda args: _local.vns(
                    args[0], args[1], inst, args[2], cfg.vns_budget, matrices
                )
                if pool is None:
                    results = [vns_fn(j) for j in jobs]
                else:
                    results = list(pool.map(vns_fn, jobs))
                for i, (chrom, obj, visited) in zip(idxs, results):
                    particles[i].position = chrom
                    particles[i].objectives = obj
                    evaluated.extend(visited)

            # barrier phase: personal bests and archive in deterministic order
            for part in particles:
                if dominates(part.objectives, part.pbest_objectives):
                    part.pbest = part.position
                    part.pbest_objectives = part.objectives
            for ch, obj in evaluated:
                archive.add(ch, obj)
            pts = archive.points()
            trace.append(
                IterationStats(
                    iteration=it,
                    best_cmax=min(p[0] for p in pts),
                    best_tec=min(p[1] for p in pts),
                    archive_points=tuple(pts),
                )
            )
        return RunResult(archive, tuple(trace))
    finally:
        if pool is not None:
            pool.shutdown()
