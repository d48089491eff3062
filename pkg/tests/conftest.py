"""Shared fixtures: tiny seeded corpora and recording builders."""

import numpy as np
import pytest

from tacgest.core import Recording, label_of_id
from tacgest.synth import SynthSpec, synth_dataset


def make_recording(frames, label_id=None, rate_hz=15.0, rec_id="r0", participant="p0"):
    """Recording from a (T, 81) array or list of 81-vectors."""
    p = np.asarray(frames, dtype=np.float64)
    if p.ndim == 1:
        p = p[None, :]
    return Recording(
        pressures=p,
        label=label_of_id(label_id) if label_id is not None else None,
        participant_id=participant,
        rec_id=rec_id,
        rate_hz=rate_hz,
    )


def blob_frame(row, col, value=1.0, size=1):
    """81-vector with a size x size block of the given value at (row, col)."""
    g = np.zeros((9, 9))
    g[row:row + size, col:col + size] = value
    return g.reshape(81)


@pytest.fixture(scope="session")
def small_corpus():
    """270 recordings: 3 virtual participants, all classes, speeds, tilts."""
    return synth_dataset(SynthSpec(participants=3), corpus_seed=0)


@pytest.fixture(scope="session")
def micro_corpus():
    """90 recordings from a single participant, for fast pipeline checks."""
    return synth_dataset(SynthSpec(participants=1), corpus_seed=7)


# Filled by tests/test_acceptance.py: one PASS/FAIL line per shipped guarantee.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
