"""Brute-force reference front by exhaustive enumeration.

Walks every distinct operation-order permutation crossed with every
machine/gear column combination, decodes each chromosome and evaluates
the two objectives with a self-contained energy summation that shares no
code with the accounting module.  The surviving non-dominated objective
points form the exact reference front of everything the decoder can
reach.

Enumeration refuses search spaces above a configurable point budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import factorial
from typing import Iterator

from .encoding import Chromosome, build_message_matrix, canonical_order, decode
from .model import ProblemInstance, ScheduledRow

DEFAULT_MAX_POINTS = 10_000_000


class SearchSpaceError(RuntimeError):
    """Raised when an instance is too large to enumerate."""

    def __init__(self, size: int, limit: int):
        super().__init__(
            f"search space holds {size} chromosomes, enumeration limit is {limit}"
        )
        self.size = size
        self.limit = limit


@dataclass(frozen=True)
class FrontResult:
    """Exact front: objective points plus one witness chromosome each."""

    points: tuple[tuple[int, float], ...]
    witnesses: tuple[Chromosome, ...]


def search_space_size(inst: ProblemInstance) -> int:
    """Number of distinct chromosomes of an instance."""
    counts = [len(job.operations) for job in inst.jobs]
    perms = factorial(sum(counts))
    for c in counts:
        perms //= factorial(c)
    combos = 1
    for job in inst.jobs:
        for op in job.operations:
            combos *= len(op.options)
    return perms * combos


def _distinct_permutations(items: list[int]) -> Iterator[tuple[int, ...]]:
    """All distinct permutations of a multiset, in lexicographic order."""
    pool = sorted(items)
    n = len(pool)
    if n == 0:
        yield ()
        return
    current = list(pool)
    while True:
        yield tuple(current)
        # next lexicographic permutation
        i = n - 2
        while i >= 0 and current[i] >= current[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while current[j] <= current[i]:
            j -= 1
        current[i], current[j] = current[j], current[i]
        current[i + 1 :] = reversed(current[i + 1 :])


def independent_objectives(
    inst: ProblemInstance, rows: tuple[ScheduledRow, ...]
) -> tuple[int, float]:
    """(makespan, total energy) recomputed from raw rows.

    Deliberately re-derives everything from first principles instead of
    calling the accounting module, so the two implementations check each
    other.
    """
    cmax = 0
    tec = 0.0
    for mach in inst.machines:
        procs = sorted(
            (r for r in rows if r.machine == mach.id and r.op_index > 0),
            key=lambda r: r.start,
        )
        setups = [r for r in rows if r.machine == mach.id and r.op_index == 0]
        for r in setups:
            tec += mach.setup_power * (r.end - r.start)
        if not procs:
            continue
        first_gear = procs[0].speed
        if mach.turn_on is not None:
            tec += mach.turn_on[first_gear - 1]
        else:
            tec += mach.switch[0][first_gear]
        for r in procs:
            tec += mach.process_power[r.speed - 1] * (r.end - r.start)
            if r.end > cmax:
                cmax = r.end
        setup_starts = {(r.job, r.end): r.start for r in setups}
        for a, b in zip(procs, procs[1:]):
            covered = b.start == a.end
            if not covered:
                st = setup_starts.get((b.job, b.start))
                covered = st is not None and st <= a.end
            if covered:
                tec += mach.switch[a.speed][b.speed]
            else:
                span = b.start - a.end
                low = min(a.speed, b.speed)
                idle_cost = mach.idle_power[low - 1] * span
                idle_cost += mach.switch[a.speed][b.speed]
                standby_cost = (
                    mach.standby_power * span
                    + mach.switch[a.speed][0]
                    + mach.switch[0][b.speed]
                )
                tec += min(idle_cost, standby_cost)
    return cmax, tec


def enumerate_front(
    inst: ProblemInstance, max_points: int = DEFAULT_MAX_POINTS
) -> FrontResult:
    """Exact non-dominated front over the whole chromosome space.

    Deterministic: chromosomes are visited in lexicographic order and the
    first witness of every surviving objective point is kept.  Raises
    SearchSpaceError when the space exceeds ``max_points``.
    """
    size = search_space_size(inst)
    if size > max_points:
        raise SearchSpaceError(size, max_points)
    matrices = build_message_matrix(inst)
    order = canonical_order(inst)
    widths = [range(1, len(matrices[key]) + 1) for key in order]
    base = [job.id for job in inst.jobs for _ in job.operations]

    front: list[tuple[int, float, Chromosome]] = []
    for os_perm in _distinct_permutations(base):
        for mv in product(*widths):
            chrom = Chromosome(os_perm, mv)
            sched = decode(inst, chrom, matrices)
            c, t = independent_objectives(inst, sched.rows)
            keep = True
            for fc, ft, _ in front:
                if (fc <= c and ft <= t and (fc < c or ft < t)) or (fc == c and ft == t):
                    keep = False
                    break
            if not keep:
                continue
            front = [
                (fc, ft, w)
                for fc, ft, w in front
                if not (c <= fc and t <= ft and (c < fc or t < ft))
            ]
            front.append((c, t, chrom))
    front.sort(key=lambda e: (e[0], e[1]))
    return FrontResult(
        points=tuple((c, t) for c, t, _ in front),
        witnesses=tuple(w for _, _, w in front),
    )


def cross_check(
    inst: ProblemInstance, chrom: Chromosome, rel_tol: float = 1e-9
) -> bool:
    """Compare the accounting module against the independent summation.

    True when both agree on the makespan exactly and on total energy to
    the given relative tolerance.
    """
    from .encoding import evaluate

    sched = decode(inst, chrom)
    c1, t1 = evaluate(inst, chrom)
    c2, t2 = independent_objectives(inst, sched.rows)
    if c1 != c2:
        return False
    scale = max(abs(t1), abs(t2), 1.0)
    return abs(t1 - t2) <= rel_tol * scale
