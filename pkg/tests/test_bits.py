"""Bit-level helpers against brute-force oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iqpsynth._bits import (
    TAU,
    canonical_angle,
    canonical_phase,
    mask_of_support,
    parity,
    qubit_cap,
    support_of_mask,
    wht_inplace,
)
from iqpsynth.errors import FormatError

from helpers import oracle_wht


def test_parity_matches_popcount():
    values = np.arange(1 << 10, dtype=np.uint64)
    got = parity(values)
    want = np.array([bin(v).count("1") % 2 for v in range(1 << 10)])
    assert np.array_equal(got, want)


def test_parity_scalar_and_no_aliasing():
    assert parity(0) == 0
    assert parity(7) == 1
    buf = np.array([3, 5], dtype=np.uint64)
    parity(buf)
    assert np.array_equal(buf, np.array([3, 5], dtype=np.uint64))


def test_mask_round_trip_convention():
    # qubit 0 is the most significant bit
    assert mask_of_support((0,), 3) == 0b100
    assert mask_of_support((2,), 3) == 0b001
    assert mask_of_support((0, 2), 3) == 0b101
    for total in range(1, 7):
        for mask in range(1 << total):
            assert mask_of_support(support_of_mask(mask, total), total) == mask


@settings(derandomize=True, max_examples=60)
@given(st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_wht_matches_oracle(n, seed):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(1 << n)
    got = wht_inplace(values.copy())
    assert np.allclose(got, oracle_wht(values), atol=1e-9)


@settings(derandomize=True, max_examples=40)
@given(st.integers(0, 8), st.integers(0, 2**32 - 1))
def test_wht_involution(n, seed):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(1 << n)
    twice = wht_inplace(wht_inplace(values.copy()))
    assert np.allclose(twice, values * (1 << n), atol=1e-9)


def test_wht_rejects_bad_length():
    with pytest.raises(ValueError):
        wht_inplace(np.zeros(3))


@settings(derandomize=True, max_examples=200)
@given(st.floats(-50.0, 50.0))
def test_canonical_ranges(x):
    phase = canonical_phase(x)
    assert 0.0 <= phase < TAU
    angle = canonical_angle(x)
    assert -np.pi < angle <= np.pi
    # both represent the same rotation
    assert abs(canonical_phase(angle) - phase) < 1e-9 or abs(
        abs(canonical_phase(angle) - phase) - TAU
    ) < 1e-9


def test_canonical_exact_boundaries():
    assert canonical_phase(TAU) == 0.0
    assert canonical_phase(0.0) == 0.0
    assert canonical_phase(-0.0) == 0.0
    assert canonical_angle(np.pi) == np.pi
    assert canonical_angle(-np.pi) == np.pi
    assert canonical_angle(TAU) == 0.0


def test_qubit_cap_env(monkeypatch):
    monkeypatch.delenv("IQP_MAX_QUBITS", raising=False)
    assert qubit_cap(24) == 24
    monkeypatch.setenv("IQP_MAX_QUBITS", "10")
    assert qubit_cap(24) == 10
    assert qubit_cap(8) == 8
    monkeypatch.setenv("IQP_MAX_QUBITS", "banana")
    with pytest.raises(FormatError):
        qubit_cap(24)
