"""Shared fixtures: the two-job walkthrough instance and derived objects."""

from __future__ import annotations

import pytest

from efjsp.encoding import build_message_matrix, decode
from efjsp.sample import sample_chromosome, sample_instance


@pytest.fixture(scope="session")
def inst():
    return sample_instance()


@pytest.fixture(scope="session")
def chrom():
    return sample_chromosome()


@pytest.fixture(scope="session")
def matrices(inst):
    return build_message_matrix(inst)


@pytest.fixture(scope="session")
def sched(inst, chrom):
    return decode(inst, chrom)
