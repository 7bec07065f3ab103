"""Bit-level and angle helpers shared by the synthesis and simulation modules.

Qubit convention (fixed globally): qubit 0 is the leftmost bit of an
outcome bitstring, i.e. the most significant bit of the outcome index.
A support set of qubit indices therefore maps to the integer mask
``sum(1 << (total - 1 - i) for i in support)``.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import FormatError

TAU = 2.0 * np.pi

ENV_MAX_QUBITS = "IQP_MAX_QUBITS"


def qubit_cap(default: int) -> int:
    """Hard qubit cap for an operation, optionally lowered via IQP_MAX_QUBITS."""
    raw = os.environ.get(ENV_MAX_QUBITS)
    if raw is None:
        return default
    try:
        override = int(raw)
    except ValueError as exc:
        raise FormatError(f"{ENV_MAX_QUBITS} must be an integer, got {raw!r}") from exc
    return min(default, override)


def parity(values: np.ndarray | int) -> np.ndarray | int:
    """Bit parity (popcount mod 2) of nonnegative integers, elementwise."""
    x = np.array(values, dtype=np.uint64, copy=True)
    x ^= x >> np.uint64(32)
    x ^= x >> np.uint64(16)
    x ^= x >> np.uint64(8)
    x ^= x >> np.uint64(4)
    x ^= x >> np.uint64(2)
    x ^= x >> np.uint64(1)
    out = (x & np.uint64(1)).astype(np.int64)
    return int(out) if np.isscalar(values) or out.ndim == 0 else out


def mask_of_support(support: tuple[int, ...], total: int) -> int:
    """Integer mask for a set of qubit indices (qubit 0 = most significant bit)."""
    mask = 0
    for q in support:
        mask |= 1 << (total - 1 - q)
    return mask


def support_of_mask(mask: int, total: int) -> tuple[int, ...]:
    """Inverse of mask_of_support; qubit indices in ascending order."""
    return tuple(i for i in range(total) if (mask >> (total - 1 - i)) & 1)


def wht_inplace(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis, in place.

    Computes out[..., x] = sum_y (-1)^popcount(x & y) * a[..., y].  The
    transform is an involution up to a factor of the axis length.
    """
    shape = a.shape
    n = shape[-1]
    if n & (n - 1):
        raise ValueError("last axis length must be a power of two")
    a = a.reshape(-1, n)
    h = 1
    while h < n:
        a = a.reshape(a.shape[0], -1, 2, h)
        lo = a[:, :, 0, :].copy()
        hi = a[:, :, 1, :]
        a[:, :, 0, :] = lo + hi
        a[:, :, 1, :] = lo - hi
        a = a.reshape(a.shape[0], n)
        h *= 2
    return a.reshape(shape)


def canonical_phase(theta: np.ndarray | float) -> np.ndarray | float:
    """Reduce phases into [0, 2*pi)."""
    out = np.mod(theta, TAU)
    out = np.where(out == TAU, 0.0, out)
    if np.ndim(theta) == 0:
        return float(out)
    return out


def canonical_angle(angle: np.ndarray | float) -> np.ndarray | float:
    """Reduce rotation angles into (-pi, pi]."""
    r = np.mod(np.pi - np.asarray(angle, dtype=np.float64), TAU)
    r = np.where(r == TAU, 0.0, r)
    out = np.pi - r
    if np.ndim(angle) == 0:
        return float(out)
    return out
