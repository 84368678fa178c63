"""Counter-based random bits keyed on (seed, column, row).

Every weight is a pure function of its key, so any cell of an arbitrarily
wide environment can be read without materialising the rest of it.  The
mixer is the splitmix64 finaliser; it is a bijection on 64-bit words.
"""

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_GOLDEN = 0x9E3779B97F4A7C15
_ROW = 0xC2B2AE3D27D4EB4F
_DRAW = 0x165667B19E3779F9

# numba needs typed constants to stay in uint64 arithmetic
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_U_GOLDEN = np.uint64(_GOLDEN)
_U_ROW = np.uint64(_ROW)
_U_DRAW = np.uint64(_DRAW)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_S63 = np.uint64(63)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


def mix64(z):
    """splitmix64 finaliser on Python ints (masked to 64 bits)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master, *tags):
    """Fold integer tags into a 64-bit seed.  Order of tags matters."""
    z = mix64(master + _GOLDEN)
    for t in tags:
        z = mix64(z ^ ((t * _GOLDEN + _ROW) & MASK64))
    return z


def field_key(seed):
    return np.uint64(mix64(seed ^ 0x5DEECE66D))


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _S30)) * _U_M1
    z = (z ^ (z >> _S27)) * _U_M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def cell_bits(key, i, j, draw):
    h = _mix(key + np.uint64(i) * _U_GOLDEN)
    h = _mix(h ^ (np.uint64(j) * _U_ROW + np.uint64(draw + 1) * _U_DRAW))
    return h


@njit(cache=True, inline="always")
def cell_uniform(key, i, j, draw):
    """Uniform on [0, 1) with 53 random bits."""
    return float(cell_bits(key, i, j, draw) >> _S11) * _INV53


@njit(cache=True, inline="always")
def cell_open_uniform(key, i, j, draw):
    """Uniform on the open interval (0, 1)."""
    return (float(cell_bits(key, i, j, draw) >> _S11) + 0.5) * _INV53


@njit(cache=True, inline="always")
def cell_sign(key, i, j, draw):
    if cell_bits(key, i, j, draw) >> _S63:
        return 1.0
    return -1.0


@njit(cache=True)
def _mix_array(zs):
    out = np.empty_like(zs)
    for k in range(zs.shape[0]):
        out[k] = _mix(zs[k])
    return out
