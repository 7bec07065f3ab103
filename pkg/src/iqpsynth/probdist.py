"""Probability vectors over n-bit outcomes: validation, metrics, sorting, JSON I/O.

Outcome indexing is big-endian throughout the package: bit 0 of an outcome
is the leftmost character of its bitstring and belongs to qubit 0, so the
outcome with bitstring s has index int(s, 2).

The distribution file format is a JSON object, either sparse

    {"n": 2, "probs": {"00": 0.5, "11": 0.5}}

with missing bitstrings meaning probability 0, or dense

    {"n": 2, "dense": [0.5, 0.0, 0.0, 0.5]}

Decimals are parsed as base-10; serialization emits 17 significant digits,
which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import (
    BadNormalization,
    DimensionMismatch,
    FormatError,
    LengthMismatch,
    NegativeMass,
)

# Input sums are accepted within NORM_TOL of 1 and then renormalized exactly;
# negative dust above -CLAMP_TOL is clamped to zero.
NORM_TOL = 1e-9
CLAMP_TOL = 1e-12


def format_float(x: float) -> str:
    """17-significant-digit decimal form; round-trips doubles exactly."""
    return f"{x:.17g}"


def _renormalize_exact(arr: NDArray[np.float64]) -> None:
    """Scale arr so that math.fsum(arr) == 1.0 exactly, in place.

    Divides by the compensated sum, then absorbs the residual ulp into the
    largest entry until the compensated sum is exactly 1.0.  Makes
    validation idempotent, which the serialization round-trip relies on.
    """
    s = math.fsum(arr)
    if s != 1.0:
        arr /= s
    for _ in range(4):
        residual = 1.0 - math.fsum(arr)
        if residual == 0.0:
            return
        arr[int(np.argmax(arr))] += residual
    if math.fsum(arr) != 1.0:
        raise BadNormalization("renormalization did not reach an exact fixed point")


@dataclass(frozen=True)
class ProbVector:
    """Dense probability vector over all 2**n outcomes of n bits.

    Attributes
    ----------
    n : int
        Number of bits per outcome.
    probs : ndarray
        2**n nonnegative reals summing to 1 within 1e-12.  Read-only.
    """

    n: int
    probs: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise LengthMismatch(f"bit count must be nonnegative, got {self.n}")
        probs = np.array(self.probs, dtype=np.float64, copy=True)
        if probs.ndim != 1 or probs.shape[0] != 1 << self.n:
            raise LengthMismatch(
                f"expected {1 << self.n} entries for n={self.n}, got shape {probs.shape}"
            )
        if not np.all(np.isfinite(probs)):
            raise BadNormalization("probabilities must be finite")
        if np.any(probs < 0.0):
            raise NegativeMass("probabilities must be nonnegative")
        if abs(math.fsum(probs) - 1.0) > CLAMP_TOL:
            raise BadNormalization(
                f"probabilities sum to {math.fsum(probs)!r}, expected 1 within {CLAMP_TOL}"
            )
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return 1 << self.n

    def bitstring(self, index: int) -> str:
        """Bitstring label of an outcome index (qubit 0 leftmost)."""
        return format(index, f"0{self.n}b") if self.n else ""


def validate(raw, n: int) -> ProbVector:
    """Validate and exactly renormalize a raw probability array.

    Parameters
    ----------
    raw : array_like
        2**n finite reals.
    n : int
        Number of bits per outcome.

    Returns
    -------
    ProbVector
        Entries clamped at 0 if within -1e-12 of 0, then renormalized so
        the compensated sum is exactly 1.

    Raises
    ------
    LengthMismatch
        If raw does not have exactly 2**n entries.
    NegativeMass
        If any entry is below -1e-12.
    BadNormalization
        If entries are not finite or the sum is off 1 by more than 1e-9.
    """
    arr = np.array(raw, dtype=np.float64, copy=True)
    if arr.ndim != 1 or arr.shape[0] != 1 << n:
        raise LengthMismatch(
            f"expected {1 << n} entries for n={n}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise BadNormalization("entries must be finite")
    if np.any(arr < -CLAMP_TOL):
        worst = float(arr.min())
        raise NegativeMass(f"entry {worst!r} is below -{CLAMP_TOL}")
    arr[arr < 0.0] = 0.0
    s = math.fsum(arr)
    if abs(s - 1.0) > NORM_TOL:
        raise BadNormalization(f"entries sum to {s!r}, expected 1 within {NORM_TOL}")
    _renormalize_exact(arr)
    return ProbVector(n, arr)


def tv_distance(p: ProbVector, q: ProbVector) -> float:
    """Total variation distance, half the L1 distance between p and q."""
    if p.n != q.n:
        raise DimensionMismatch(f"cannot compare n={p.n} with n={q.n}")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def sparsity(p: ProbVector, zero_tol: float = 0.0) -> int:
    """Number of entries strictly greater than zero_tol."""
    return int(np.count_nonzero(p.probs > zero_tol))


def sort_with_permutation(
    p: ProbVector,
) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    """Sort probabilities ascending, keeping the outcome labels.

    Returns
    -------
    values : ndarray
        p.probs in nondecreasing order.
    perm : ndarray
        perm[i] is the original outcome index of values[i].  The sort is
        stable, so ties keep their original index order, and
        values == p.probs[perm].
    """
    perm = np.argsort(p.probs, kind="stable").astype(np.int64)
    return p.probs[perm].copy(), perm


def serialize_dist(p: ProbVector) -> str:
    """Serialize to the sparse JSON text form with 17-significant-digit decimals."""
    items = ", ".join(
        f'"{p.bitstring(j)}": {format_float(float(p.probs[j]))}'
        for j in range(len(p))
        if p.probs[j] != 0.0
    )
    return f'{{"n": {p.n}, "probs": {{{items}}}}}'


def parse_dist(text: str) -> ProbVector:
    """Parse either JSON form of the distribution file format and validate it."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise FormatError("top level must be a JSON object")
    unknown = set(obj) - {"n", "probs", "dense"}
    if unknown:
        raise FormatError(f"unknown keys: {sorted(unknown)}")
    n = obj.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise FormatError('"n" must be a nonnegative integer')
    has_probs = "probs" in obj
    has_dense = "dense" in obj
    if has_probs == has_dense:
        raise FormatError('exactly one of "probs" or "dense" is required')
    if has_dense:
        dense = obj["dense"]
        if not isinstance(dense, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in dense
        ):
            raise FormatError('"dense" must be a list of numbers')
        return validate(np.asarray(dense, dtype=np.float64), n)
    probs = obj["probs"]
    if not isinstance(probs, dict):
        raise FormatError('"probs" must be an object keyed by bitstrings')
    arr = np.zeros(1 << n, dtype=np.float64)
    for key, value in probs.items():
        if len(key) != n or any(c not in "01" for c in key):
            raise FormatError(f"key {key!r} is not a {n}-bit string")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise FormatError(f"value for {key!r} is not a number")
        arr[int(key, 2) if n else 0] = float(value)
    return validate(arr, n)
