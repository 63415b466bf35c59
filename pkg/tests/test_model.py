"""Schedule table structure, validation, and idle-interval extraction."""

from __future__ import annotations

import dataclasses

import pytest

from efjsp.model import (
    IdleIntervalRecord,
    Machine,
    ProblemInstance,
    ScheduledRow,
    ScheduleTable,
    continuous_pairs,
    idle_intervals,
    makespan,
    validate_instance,
    validate_schedule,
)


def test_sample_instance_is_valid(inst):
    report = validate_instance(inst)
    assert report.ok
    assert report.errors == []
    assert report.violations == []


def test_instance_lookups(inst):
    assert inst.job(2).setup_time == 2
    assert inst.machine(2).standby_power == 2.0
    assert inst.total_operations == 6
    op = inst.operation(2, 2)
    assert {(o.machine, o.speed) for o in op.options} == {
        (1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3),
    }


def test_validate_instance_flags_negative_switch(inst):
    m = inst.machines[0]
    bad_switch = tuple(
        tuple(-1.0 if (i, j) == (1, 2) else v for j, v in enumerate(row))
        for i, row in enumerate(m.switch)
    )
    bad = dataclasses.replace(m, switch=bad_switch)
    inst2 = dataclasses.replace(inst, machines=(bad,) + inst.machines[1:])
    report = validate_instance(inst2)
    assert not report.ok
    assert any("switch" in v for v in report.violations)


def test_makespan_and_rows(sched):
    assert makespan(sched) == 21
    process = [r for r in sched.rows if not r.is_setup]
    setups = [r for r in sched.rows if r.is_setup]
    assert len(process) == 6
    assert len(setups) == 3
    for r in setups:
        assert r.speed == 0
        assert r.op_index == 0


def test_validate_schedule_accepts_decoded(inst, sched):
    report = validate_schedule(inst, sched)
    assert report.ok, str(report)


def test_validate_schedule_rejects_overlap(inst, sched):
    shifted = []
    for r in sched.rows:
        if (r.job, r.op_index, r.machine) == (1, 2, 1):
            shifted.append(r._replace(start=5, end=7))
        else:
            shifted.append(r)
    report = validate_schedule(inst, ScheduleTable(tuple(shifted), inst))
    assert not report.ok


def test_validate_schedule_rejects_missing_operation(inst, sched):
    rows = tuple(r for r in sched.rows if (r.job, r.op_index) != (2, 4))
    report = validate_schedule(inst, ScheduleTable(rows, inst))
    assert not report.ok
    assert any("missing" in v for v in report.violations)


def test_validate_schedule_rejects_precedence_break(inst, sched):
    # swap the start times of a job's two consecutive operations
    rows = []
    for r in sched.rows:
        if (r.job, r.op_index) == (2, 3):
            rows.append(r._replace(start=2, end=5))
        elif (r.job, r.op_index) == (2, 1):
            rows.append(r._replace(start=12, end=21))
        else:
            rows.append(r)
    report = validate_schedule(inst, ScheduleTable(tuple(rows), inst))
    assert not report.ok


def test_validate_schedule_flags_new_job_block_without_setup(inst, sched):
    rows = tuple(r for r in sched.rows if not (r.is_setup and r.machine == 2))
    report = validate_schedule(inst, ScheduleTable(rows, inst))
    assert not report.ok
    assert any("setup" in v for v in report.violations)


def test_idle_intervals_of_sample(sched):
    assert idle_intervals(sched, 1) == [
        IdleIntervalRecord(machine=1, start=9, end=15, prev_speed=3, next_speed=2)
    ]
    assert idle_intervals(sched, 2) == [
        IdleIntervalRecord(machine=2, start=15, end=18, prev_speed=2, next_speed=3)
    ]


def test_interval_record_length():
    rec = IdleIntervalRecord(machine=1, start=9, end=15, prev_speed=3, next_speed=2)
    assert rec.length == 6


def test_continuous_pairs_of_sample(sched):
    # back-to-back rows and setup-covered gaps count as continuous
    m1 = continuous_pairs(sched, 1)
    keys = {((a.job, a.op_index), (b.job, b.op_index)) for a, b in m1}
    assert ((1, 1), (1, 2)) in keys
    assert ((2, 3), None) not in keys
    m2 = continuous_pairs(sched, 2)
    keys2 = {((a.job, a.op_index), (b.job, b.op_index)) for a, b in m2}
    assert ((2, 1), (2, 2)) in keys2


def test_setup_covered_gap_is_continuous(inst):
    # a gap fully hidden behind the follower's setup produces no interval
    rows = (
        ScheduledRow(job=1, op_index=0, machine=1, speed=0, start=0, end=1),
        ScheduledRow(job=1, op_index=1, machine=1, speed=3, start=1, end=7),
        ScheduledRow(job=2, op_index=0, machine=1, speed=0, start=7, end=9),
        ScheduledRow(job=2, op_index=1, machine=1, speed=3, start=9, end=19),
    )
    sched = ScheduleTable(rows, inst)
    assert idle_intervals(sched, 1) == []


def test_makespan_requires_process_rows(inst):
    only_setup = (ScheduledRow(1, 0, 1, 0, 0, 1),)
    with pytest.raises(ValueError):
        makespan(ScheduleTable(only_setup, inst))


def test_instance_contiguity_check():
    m = Machine(
        id=1,
        setup_power=1.0,
        process_power=(1.0, 2.0, 3.0),
        idle_power=(1.0, 2.0, 3.0),
        standby_power=0.5,
        switch=tuple(tuple(0.0 for _ in range(4)) for _ in range(4)),
    )
    from efjsp.model import JobSpec, OperationSpec, ProcessingOption

    job = JobSpec(
        id=5,
        setup_time=1,
        operations=(
            OperationSpec(job=5, op_index=1, options=(ProcessingOption(1, 1, 4),)),
        ),
    )
    inst = ProblemInstance(jobs=(job,), machines=(m,), speed_count=3)
    report = validate_instance(inst)
    assert not report.ok
