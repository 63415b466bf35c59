"""Variable neighbourhood search around the critical path.

The critical path is recovered by merging every setup row into the
process row it serves and walking backwards from the latest completion,
always stepping to the later-completing of the job predecessor and the
machine predecessor (ties prefer the machine predecessor), until a row
that starts at time zero.

Three neighbourhood structures perturb a chromosome:

* n1 moves a random critical operation to a random column of a different
  machine,
* n2 swaps the sequence positions of two random critical operations,
* n3 moves a random operation off the busiest machine.

The search cycles n1, n2, n3 with a fixed evaluation budget per
structure, restarting from n1 whenever a neighbour dominates the current
solution, and stops after a full fruitless cycle or at a hard cap of ten
times the per-structure budget.
"""

from __future__ import annotations

import random

from .encoding import Chromosome, MessageMatrix, build_message_matrix, decode, evaluate
from .model import ProblemInstance, ScheduleTable

STRUCTURES = ("n1", "n2", "n3")

_RETRIES = 10
_TOTAL_BUDGET_FACTOR = 10


def _merged_spans(sched: ScheduleTable) -> dict[tuple[int, int], tuple[int, int, int]]:
    """(job, op) -> (start, end, machine) with setups folded into starts."""
    setups = {}
    for row in sched.rows:
        if row.is_setup:
            setups[(row.machine, row.job, row.end)] = row.start
    spans = {}
    for row in sched.rows:
        if row.is_setup:
            continue
        start = setups.get((row.machine, row.job, row.start), row.start)
        spans[(row.job, row.op_index)] = (start, row.end, row.machine)
    return spans


def critical_path(
    inst: ProblemInstance, sched: ScheduleTable
) -> list[tuple[int, int]]:
    """Operations on one critical chain, in processing order."""
    spans = _merged_spans(sched)
    if not spans:
        return []
    by_machine: dict[int, list[tuple[int, tuple[int, int]]]] = {}
    for key, (start, end, machine) in spans.items():
        by_machine.setdefault(machine, []).append((start, key))
    for rows in by_machine.values():
        rows.sort()

    def machine_pred(key: tuple[int, int]) -> tuple[int, int] | None:
        start, _, machine = spans[key]
        rows = by_machine[machine]
        pos = next(i for i, (s, k) in enumerate(rows) if k == key)
        return rows[pos - 1][1] if pos > 0 else None

    current = min(spans, key=lambda k: (-spans[k][1], k))
    path = [current]
    while True:
        start = spans[current][0]
        if start == 0:
            break
        job, op = current
        beta = (job, op - 1) if op > 1 else None
        gamma = machine_pred(current)
        if beta is None and gamma is None:
            break
        c_beta = spans[beta][1] if beta is not None else 0
        c_gamma = spans[gamma][1] if gamma is not None else 0
        current = beta if c_beta > c_gamma else gamma
        path.append(current)
    path.reverse()
    return path


def _move_to_other_machine(
    chrom: Chromosome,
    key: tuple[int, int],
    inst: ProblemInstance,
    matrices: dict[tuple[int, int], MessageMatrix],
    position: int,
    rng: random.Random,
) -> Chromosome | None:
    mm = matrices[key]
    current_machine = mm.machines[chrom.mv[position] - 1]
    others = sorted(set(mm.machines) - {current_machine})
    if not others:
        return None
    target = others[rng.randrange(len(others))]
    columns = [i + 1 for i, m in enumerate(mm.machines) if m == target]
    col = columns[rng.randrange(len(columns))]
    mv = list(chrom.mv)
    mv[position] = col
    return Chromosome(chrom.os, tuple(mv))


def _os_position(chrom: Chromosome, key: tuple[int, int]) -> int:
    job, op = key
    seen = 0
    for idx, entry in enumerate(chrom.os):
        if entry == job:
            seen += 1
            if seen == op:
                return idx
    raise ValueError(f"operation {key} not present in os")


def neighbor(
    chrom: Chromosome,
    structure: str,
    inst: ProblemInstance,
    sched: ScheduleTable,
    rng: random.Random,
    matrices: dict[tuple[int, int], MessageMatrix] | None = None,
) -> Chromosome | None:
    """One random neighbour under the given structure, or None.

    None signals that the structure cannot produce a meaningful move for
    this schedule (for example every critical operation runs on its only
    machine), after a bounded number of resampling attempts.
    """
    if structure not in STRUCTURES:
        raise ValueError(f"unknown neighbourhood structure {structure!r}")
    if matrices is None:
        matrices = build_message_matrix(inst)
    posmap = {key: i for i, key in enumerate(
        (job.id, op.op_index) for job in inst.jobs for op in job.operations
    )}

    if structure in ("n1", "n2"):
        path = critical_path(inst, sched)
        if not path:
            return None
        if structure == "n1":
            for _ in range(_RETRIES):
                key = path[rng.randrange(len(path))]
                moved = _move_to_other_machine(
                    chrom, key, inst, matrices, posmap[key], rng
                )
                if moved is not None:
                    return moved
            return None
        if len(path) < 2:
            return None
        for _ in range(_RETRIES):
            a, b = rng.sample(range(len(path)), 2)
            ka, kb = path[a], path[b]
            if ka[0] == kb[0]:
                continue  # same job: swapping their os entries changes nothing
            ia, ib = _os_position(chrom, ka), _os_position(chrom, kb)
            os = list(chrom.os)
            os[ia], os[ib] = os[ib], os[ia]
            return Chromosome(tuple(os), chrom.mv)
        return None

    loads: dict[int, int] = {m.id: 0 for m in inst.machines}
    for row in sched.rows:
        loads[row.machine] += row.duration
    busiest = max(sorted(loads), key=lambda m: loads[m])
    on_machine = [
        (r.job, r.op_index)
        for r in sched.rows
        if r.machine == busiest and not r.is_setup
    ]
    if not on_machine:
        return None
    for _ in range(_RETRIES):
        key = on_machine[rng.randrange(len(on_machine))]
        moved = _move_to_other_machine(chrom, key, inst, matrices, posmap[key], rng)
        if moved is not None:
            return moved
    return None


def vns(
    chrom: Chromosome,
    objectives: tuple[int, float],
    inst: ProblemInstance,
    rng: random.Random,
    budget: int = 20,
    matrices: dict[tuple[int, int], MessageMatrix] | None = None,
) -> tuple[Chromosome, tuple[int, float], list[tuple[Chromosome, tuple[int, float]]]]:
    """Variable neighbourhood descent from one solution.

    Returns the best solution found (never dominated by the input), its
    objectives, and every evaluated neighbour for archive feeding.
    """
    if matrices is None:
        matrices = build_message_matrix(inst)
    visited: list[tuple[Chromosome, tuple[int, float]]] = []
    if budget <= 0:
        return chrom, objectives, visited
    from .optimizer import dominates

    cap = _TOTAL_BUDGET_FACTOR * budget
    spent = 0
    current, cur_obj = chrom, objectives
    sched = decode(inst, current, matrices)
    k = 0
    while k < len(STRUCTURES) and spent < cap:
        improved = False
        for _ in range(budget):
            if spent >= cap:
                break
            nb = neighbor(current, STRUCTURES[k], inst, sched, rng, matrices)
            if nb is None:
                break
            obj = evaluate(inst, nb, matrices)
            spent += 1
            visited.append((nb, obj))
            if dominates(obj, cur_obj):
                current, cur_obj = nb, obj
                sched = decode(inst, current, matrices)
                improved = True
                break
        k = 0 if improved else k + 1
    return current, cur_obj, visited
