"""Exact simulation of phase tables and gate lists, plus sampling.

Two independent routes to the visible marginal exist on purpose.
marginal_full materializes the whole (m+n)-qubit state, applies the final
Hadamard layer, and traces out the hidden register.  marginal_mixture
never builds the joint state: each hidden value contributes one n-qubit
row whose transform is a Walsh pass, and the rows average into the
marginal.  The two must agree to near machine precision on every input;
disagreement means a bug, not noise.

Statevector indexing follows the package convention: qubit 0 is the most
significant bit of the basis index.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ._bits import qubit_cap, mask_of_support, wht_inplace
from .errors import BadNormalization, BadTarget, TooManyQubits
from .probdist import ProbVector, validate
from .synth import GateList, PhaseTable

# Dense statevectors are refused past this many qubits (16 bytes each).
DENSE_MAX_QUBITS = 24

# The mixture path holds only 2**n-sized buffers but still walks 2**m rows.
MIXTURE_MAX_TOTAL = 32

# Rows are processed in blocks of about this many table entries.
CHUNK_ENTRIES = 1 << 22

DEFAULT_SEED = 0

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex amplitudes over 2**qubits basis states."""

    qubits: int
    amps: NDArray[np.complex128]

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=np.complex128, copy=True)
        if amps.shape != (1 << self.qubits,):
            raise BadNormalization(
                f"expected {1 << self.qubits} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if not math.isfinite(norm) or abs(norm - 1.0) > _NORM_TOL:
            raise BadNormalization(f"squared norm {norm!r} is not 1 within {_NORM_TOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)


def full_statevector(pt: PhaseTable) -> StateVector:
    """Joint state after the diagonal layer: 2**(-(m+n)/2) * exp(i*theta)."""
    total = pt.m + pt.n
    cap = qubit_cap(DENSE_MAX_QUBITS)
    if total > cap:
        raise TooManyQubits(f"dense state needs {total} qubits, cap is {cap}")
    amps = np.exp(1j * pt.theta) * (2.0 ** (-0.5 * total))
    return StateVector(total, amps)


def apply_hadamard_layer(state: StateVector, targets: Iterable[int]) -> StateVector:
    """Apply a Hadamard to each target qubit of a statevector."""
    q = state.qubits
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise BadTarget("duplicate target qubit")
    if any(t < 0 or t >= q for t in targets):
        raise BadTarget(f"target outside [0, {q})")
    amps = state.amps.copy().reshape((2,) * q)
    scale = 1.0 / math.sqrt(2.0)
    for t in targets:
        lo_ix = tuple(0 if i == t else slice(None) for i in range(q))
        hi_ix = tuple(1 if i == t else slice(None) for i in range(q))
        lo = amps[lo_ix].copy()
        hi = amps[hi_ix]
        amps[lo_ix] = (lo + hi) * scale
        amps[hi_ix] = (lo - hi) * scale
    return StateVector(q, amps.reshape(-1))


def marginal_full(pt: PhaseTable) -> ProbVector:
    """Visible marginal via the joint state and a full Hadamard layer."""
    state = apply_hadamard_layer(full_statevector(pt), range(pt.m + pt.n))
    joint = state.amps.real**2 + state.amps.imag**2
    probs = joint.reshape(1 << pt.m, 1 << pt.n).sum(axis=0)
    return validate(probs, pt.n)


def marginal_mixture(pt: PhaseTable) -> ProbVector:
    """Visible marginal as a uniform mixture over hidden rows.

    Hidden value j contributes |WHT(exp(i*theta_row_j))|**2; the average,
    scaled by 4**-n, is the marginal.  Memory stays at O(2**n) however
    large the hidden register is, so this is the scalable route.
    """
    vis_cap = qubit_cap(DENSE_MAX_QUBITS)
    if pt.n > vis_cap:
        raise TooManyQubits(f"visible register is {pt.n} qubits, cap is {vis_cap}")
    total_cap = qubit_cap(MIXTURE_MAX_TOTAL)
    if pt.m + pt.n > total_cap:
        raise TooManyQubits(
            f"mixture walks {pt.m + pt.n} qubits total, cap is {total_cap}"
        )
    size = 1 << pt.n
    rows = 1 << pt.m
    per_chunk = max(1, CHUNK_ENTRIES // size)
    acc = np.zeros(size, dtype=np.float64)
    for start in range(0, rows, per_chunk):
        stop = min(rows, start + per_chunk)
        block = pt.theta[start << pt.n : stop << pt.n].reshape(stop - start, size)
        z = wht_inplace(np.exp(1j * block))
        acc += (z.real**2 + z.imag**2).sum(axis=0)
    return validate(acc / float(1 << (pt.m + 2 * pt.n)), pt.n)


def is_uma(state: StateVector, tol: float = 1e-12) -> bool:
    """Whether every amplitude has modulus 2**(-qubits/2) within tol."""
    target = 2.0 ** (-0.5 * state.qubits)
    return bool(np.max(np.abs(np.abs(state.amps) - target)) <= tol)


def simulate_gates(g: GateList) -> StateVector:
    """Run exp(i * angle * X_S) gates on the all-zeros state.

    Gates commute, so list order cannot matter; each application is
    cos(a) * psi + i*sin(a) * (psi with the support bits flipped).
    The global phase multiplies in at the end.
    """
    total = g.total_qubits
    cap = qubit_cap(DENSE_MAX_QUBITS)
    if total > cap:
        raise TooManyQubits(f"gate simulation needs {total} qubits, cap is {cap}")
    size = 1 << total
    amps = np.zeros(size, dtype=np.complex128)
    amps[0] = 1.0
    indices = np.arange(size)
    for support, angle in g.gates:
        mask = mask_of_support(support, total)
        amps = math.cos(angle) * amps + (1j * math.sin(angle)) * amps[indices ^ mask]
    return StateVector(total, amps * np.exp(1j * g.global_phase))


def sample(p: ProbVector, count: int, seed: int = DEFAULT_SEED) -> list[str]:
    """Draw count outcome bitstrings from p, reproducibly for a given seed."""
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    if count == 0:
        return []
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(p.probs)
    cdf[-1] = 1.0  # guard against cumulative rounding at the top
    draws = np.searchsorted(cdf, rng.random(count), side="right")
    return [p.bitstring(int(j)) for j in draws]
