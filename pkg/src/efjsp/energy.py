"""Exact energy accounting for schedules.

Total energy is the sum of five parts:

* turn-on energy when each used machine first powers up,
* speed-switch energy between back-to-back operations at different gears,
* setup energy (setup power times setup duration),
* processing energy (per-gear process power times running time),
* idle/standby energy for every interior non-processing stretch.

For an interior stretch the machine either waits at the lower of the two
adjacent gears (paying idle power plus one speed switch) or drops to
standby (paying standby power plus a switch down to speed 0 and back up).
The cheaper choice is taken, ties going to waiting idle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    IdleIntervalRecord,
    ProblemInstance,
    ScheduleTable,
    continuous_pairs,
    idle_intervals,
    process_rows,
    setup_rows,
)

MODE_IDLE = "idle"
MODE_STANDBY = "standby"


@dataclass(frozen=True)
class IntervalDecision:
    """Resolved treatment of one interior non-processing stretch.

    ``idle_speed`` is the gear the machine would hold while idling (the
    lower of the two neighbouring gears).  ``switch_on_entry`` tells on
    which side of the stretch the single speed switch of the idle option
    falls: at entry when slowing down, at exit when speeding up.
    """

    interval: IdleIntervalRecord
    mode: str
    idle_speed: int
    switch_on_entry: bool
    energy: float


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-component energy totals for one schedule."""

    turn_on: float
    transition: float
    setup: float
    process: float
    interval: float
    tec: float
    interval_decisions: tuple[IntervalDecision, ...]


def turn_on_energy(inst: ProblemInstance, sched: ScheduleTable) -> float:
    """Power-up energy: one charge per machine that processes anything.

    The charge brings the machine from off to the gear of its first
    process row, using the machine's turn-on vector when present and the
    switch table row from speed 0 otherwise.  Turning off is free.
    """
    total = 0.0
    for mach in inst.machines:
        rows = process_rows(sched, mach.id)
        if not rows:
            continue
        g = rows[0].speed
        if mach.turn_on is not None:
            total += mach.turn_on[g - 1]
        else:
            total += mach.switch[0][g]
    return total


def transition_energy(inst: ProblemInstance, sched: ScheduleTable) -> float:
    """Switch energy between continuous operations at different gears.

    Two operations count as continuous when nothing but the follower's
    setup row separates them; the gear change is then charged once,
    across the setup if one is present.
    """
    total = 0.0
    for mach in inst.machines:
        for a, b in continuous_pairs(sched, mach.id):
            if a.speed != b.speed:
                total += mach.switch[a.speed][b.speed]
    return total


def setup_energy(inst: ProblemInstance, sched: ScheduleTable) -> float:
    """Setup power times setup duration, summed over all setup rows."""
    total = 0.0
    for mach in inst.machines:
        for row in setup_rows(sched, mach.id):
            total += mach.setup_power * row.duration
    return total


def process_energy(inst: ProblemInstance, sched: ScheduleTable) -> float:
    """Per-gear process power times running time, over all process rows."""
    total = 0.0
    for mach in inst.machines:
        for row in process_rows(sched, mach.id):
            total += mach.process_power[row.speed - 1] * row.duration
    return total


def interval_energy(inst: ProblemInstance, interval: IdleIntervalRecord) -> IntervalDecision:
    """Pick the cheaper of idling and standby for one interior stretch.

    Idling holds the lower of the two adjacent gears for the whole
    stretch and pays one switch between the neighbouring gears.  Standby
    pays standby power for the stretch plus the switch down to speed 0
    and the switch back up.  Ties resolve to idling.  The stretch must be
    interior: both neighbouring gears are required.
    """
    if interval.prev_speed < 1 or interval.next_speed < 1:
        raise ValueError(
            "interval energy is only defined between two process rows; "
            "boundary stretches carry no idle/standby energy"
        )
    mach = inst.machine(interval.machine)
    length = interval.length
    low = min(interval.prev_speed, interval.next_speed)
    idle_cost = mach.idle_power[low - 1] * length
    idle_cost += mach.switch[interval.prev_speed][interval.next_speed]
    standby_cost = (
        mach.standby_power * length
        + mach.switch[interval.prev_speed][0]
        + mach.switch[0][interval.next_speed]
    )
    if idle_cost <= standby_cost:
        mode, cost = MODE_IDLE, idle_cost
    else:
        mode, cost = MODE_STANDBY, standby_cost
    return IntervalDecision(
        interval=interval,
        mode=mode,
        idle_speed=low,
        switch_on_entry=interval.prev_speed > interval.next_speed,
        energy=cost,
    )


def total_energy(inst: ProblemInstance, sched: ScheduleTable) -> EnergyBreakdown:
    """Full energy breakdown of a schedule.

    ``tec`` is the exact sum of the five components.  An empty schedule
    yields an all-zero breakdown.
    """
    decisions = []
    for mach in inst.machines:
        for interval in idle_intervals(sched, mach.id):
            decisions.append(interval_energy(inst, interval))
    ie1 = turn_on_energy(inst, sched)
    ie2 = transition_energy(inst, sched)
    se1 = setup_energy(inst, sched)
    se2 = process_energy(inst, sched)
    ise = sum(d.energy for d in decisions)
    return EnergyBreakdown(
        turn_on=ie1,
        transition=ie2,
        setup=se1,
        process=se2,
        interval=ise,
        tec=ie1 + ie2 + se1 + se2 + ise,
        interval_decisions=tuple(decisions),
    )
