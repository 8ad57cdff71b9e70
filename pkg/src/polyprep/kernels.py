"""Statevector update kernels.

Two interchangeable backends: numba-jitted loops (default) and pure numpy.
Selection: POLYPREP_BACKEND=numpy forces the fallback; anything else uses
numba when importable. Both produce bit-identical results; the benchmark in
benchmarks/bench_kernels.py compares them head to head.

Index convention: qubit 0 is the most significant bit, so qubit q of a
width-w register sits at bit position (w - 1 - q).

Each gate reduces to one of three primitives acting on the amplitudes whose
index matches (idx & cmask) == cval:
    mix:   2x2 matrix on the target bit
    swapk: X on the target bit (pure pair swap)
    phase: multiply matching amplitudes by a scalar (target bit pinned 1)

The enumeration of matching pairs compresses the free bits: masks split a
counter into chunks that are shifted past the pinned bit positions.
"""
from __future__ import annotations

import cmath
import math
import os

import numpy as np

_ENV = "POLYPREP_BACKEND"

try:
    import numba
    from numba import njit, prange
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def _spread_masks(positions: list[int], width: int) -> np.ndarray:
    """Masks such that OR_j ((i & masks[j]) << j) scatters a compact counter
    over the bit positions not in `positions` (ascending)."""
    positions = sorted(positions)
    k = len(positions)
    masks = np.empty(k + 1, dtype=np.uint64)
    for j, p in enumerate(positions):
        masks[j] = (1 << (p - j)) - 1
    masks[k] = (1 << (width - k)) - 1 if width > k else 0
    for j in range(k, 0, -1):
        masks[j] &= ~masks[j - 1]
    return masks


# ---------------------------------------------------------------------------
# numpy backend

def _scatter_np(masks: np.ndarray, n: int) -> np.ndarray:
    i = np.arange(n, dtype=np.uint64)
    out = np.zeros(n, dtype=np.uint64)
    for j in range(len(masks)):
        out |= (i & masks[j]) << np.uint64(j)
    return out


def _mix_np(amps, width, tpos, cmask, cval, m00, m01, m10, m11):
    pins = [tpos] + [p for p in range(width) if (cmask >> p) & 1]
    masks = _spread_masks(pins, width)
    base = _scatter_np(masks, 1 << (width - len(pins)))
    i0 = base | np.uint64(cval)
    i1 = i0 | np.uint64(1 << tpos)
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = m00 * a0 + m01 * a1
    amps[i1] = m10 * a0 + m11 * a1


def _swap_np(amps, width, tpos, cmask, cval):
    pins = [tpos] + [p for p in range(width) if (cmask >> p) & 1]
    masks = _spread_masks(pins, width)
    base = _scatter_np(masks, 1 << (width - len(pins)))
    i0 = base | np.uint64(cval)
    i1 = i0 | np.uint64(1 << tpos)
    tmp = amps[i0].copy()
    amps[i0] = amps[i1]
    amps[i1] = tmp


def _phase_np(amps, width, pmask, pval, phase):
    pins = [p for p in range(width) if (pmask >> p) & 1]
    masks = _spread_masks(pins, width)
    idx = _scatter_np(masks, 1 << (width - len(pins))) | np.uint64(pval)
    amps[idx] *= phase


# ---------------------------------------------------------------------------
# numba backend

if HAS_NUMBA:

    @njit(numba.uint64(numba.uint64[::1], numba.uint64), cache=True, inline="always")
    def _scatter_one(masks, i):
        out = numba.uint64(0)
        for j in range(masks.shape[0]):
            out |= (i & masks[j]) << numba.uint64(j)
        return out

    @njit(cache=True, parallel=True, nogil=True)
    def _mix_nb(amps, masks, cval, tbit, npairs, m00, m01, m10, m11):
        for i in prange(npairs):
            i0 = _scatter_one(masks, numba.uint64(i)) | cval
            i1 = i0 | tbit
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = m00 * a0 + m01 * a1
            amps[i1] = m10 * a0 + m11 * a1

    @njit(cache=True, parallel=True, nogil=True)
    def _swap_nb(amps, masks, cval, tbit, npairs):
        for i in prange(npairs):
            i0 = _scatter_one(masks, numba.uint64(i)) | cval
            i1 = i0 | tbit
            tmp = amps[i0]
            amps[i0] = amps[i1]
            amps[i1] = tmp

    @njit(cache=True, parallel=True, nogil=True)
    def _phase_nb(amps, masks, pval, nmatch, phase):
        for i in prange(nmatch):
            idx = _scatter_one(masks, numba.uint64(i)) | pval
            amps[idx] *= phase


def _mix_numba(amps, width, tpos, cmask, cval, m00, m01, m10, m11):
    pins = [tpos] + [p for p in range(width) if (cmask >> p) & 1]
    masks = _spread_masks(pins, width)
    _mix_nb(amps, masks, np.uint64(cval), np.uint64(1 << tpos),
            1 << (width - len(pins)), m00, m01, m10, m11)


def _swap_numba(amps, width, tpos, cmask, cval):
    pins = [tpos] + [p for p in range(width) if (cmask >> p) & 1]
    masks = _spread_masks(pins, width)
    _swap_nb(amps, masks, np.uint64(cval), np.uint64(1 << tpos),
             1 << (width - len(pins)))


def _phase_numba(amps, width, pmask, pval, phase):
    pins = [p for p in range(width) if (pmask >> p) & 1]
    masks = _spread_masks(pins, width)
    _phase_nb(amps, masks, np.uint64(pval), 1 << (width - len(pins)), phase)


_BACKENDS = {"numpy": (_mix_np, _swap_np, _phase_np)}
if HAS_NUMBA:
    _BACKENDS["numba"] = (_mix_numba, _swap_numba, _phase_numba)


def default_backend() -> str:
    requested = os.environ.get(_ENV, "").strip().lower()
    if requested in _BACKENDS:
        return requested
    return "numba" if HAS_NUMBA else "numpy"


_active = default_backend()


def active_backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Switch kernel implementations; returns the previous backend name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    prev = _active
    _active = name
    return prev


class use_backend:
    """Context manager to run a block under a specific backend."""

    def __init__(self, name: str):
        self.name = name
        self._prev = None

    def __enter__(self):
        self._prev = set_backend(self.name)
        return self

    def __exit__(self, *exc):
        set_backend(self._prev)


# ---------------------------------------------------------------------------
# Gate dispatch

_SQ2 = 1.0 / math.sqrt(2.0)


def base_matrix(base: str, params) -> np.ndarray:
    """2x2 matrix of a base gate (full-angle r convention)."""
    if base == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if base == "h":
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
    if base == "z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if base == "ry":
        t = params[0] / 2.0
        return np.array([[math.cos(t), -math.sin(t)],
                         [math.sin(t), math.cos(t)]], dtype=complex)
    if base == "rz":
        t = params[0] / 2.0
        return np.array([[cmath.exp(-1j * t), 0],
                         [0, cmath.exp(1j * t)]], dtype=complex)
    if base == "r":
        th, ph, la = params
        return np.array(
            [[cmath.exp(1j * (la + ph)) * math.cos(th),
              cmath.exp(1j * ph) * math.sin(th)],
             [cmath.exp(1j * la) * math.sin(th), -math.cos(th)]],
            dtype=complex)
    raise ValueError(f"no matrix for base {base!r}")


def apply_gate(amps: np.ndarray, width: int, gate) -> None:
    """Apply one IR gate in place to a 2^width amplitude array."""
    mix, swapk, phase = _BACKENDS[_active]
    tq = gate.targets[0]
    tpos = width - 1 - tq
    cmask = 0
    cval = 0
    for q, s in gate.controls:
        p = width - 1 - q
        cmask |= 1 << p
        if s:
            cval |= 1 << p
    if gate.base == "x":
        swapk(amps, width, tpos, cmask, cval)
    elif gate.base == "z":
        phase(amps, width, cmask | (1 << tpos), cval | (1 << tpos), -1.0 + 0.0j)
    else:
        m = base_matrix(gate.base, gate.params)
        mix(amps, width, tpos, cmask, cval,
            complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))
