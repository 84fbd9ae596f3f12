"""JIT-compiled keccak-f[1600] backend. Import fails cleanly without numba.

Kept in its own module so numba's on-disk cache can locate the function and
so that importing the package never pays the numba import cost unless
acceleration is requested.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_RC = np.array([
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
], dtype=np.uint64)

_RATE = 136


@njit(cache=True)
def _permute(a, rc_table):  # pragma: no cover - compiled
    for r in range(24):
        c0 = a[0] ^ a[5] ^ a[10] ^ a[15] ^ a[20]
        c1 = a[1] ^ a[6] ^ a[11] ^ a[16] ^ a[21]
        c2 = a[2] ^ a[7] ^ a[12] ^ a[17] ^ a[22]
        c3 = a[3] ^ a[8] ^ a[13] ^ a[18] ^ a[23]
        c4 = a[4] ^ a[9] ^ a[14] ^ a[19] ^ a[24]
        d0 = c4 ^ ((c1 << uint64(1)) | (c1 >> uint64(63)))
        d1 = c0 ^ ((c2 << uint64(1)) | (c2 >> uint64(63)))
        d2 = c1 ^ ((c3 << uint64(1)) | (c3 >> uint64(63)))
        d3 = c2 ^ ((c4 << uint64(1)) | (c4 >> uint64(63)))
        d4 = c3 ^ ((c0 << uint64(1)) | (c0 >> uint64(63)))
        a0 = a[0] ^ d0; a5 = a[5] ^ d0; a10 = a[10] ^ d0; a15 = a[15] ^ d0; a20 = a[20] ^ d0
        a1 = a[1] ^ d1; a6 = a[6] ^ d1; a11 = a[11] ^ d1; a16 = a[16] ^ d1; a21 = a[21] ^ d1
        a2 = a[2] ^ d2; a7 = a[7] ^ d2; a12 = a[12] ^ d2; a17 = a[17] ^ d2; a22 = a[22] ^ d2
        a3 = a[3] ^ d3; a8 = a[8] ^ d3; a13 = a[13] ^ d3; a18 = a[18] ^ d3; a23 = a[23] ^ d3
        a4 = a[4] ^ d4; a9 = a[9] ^ d4; a14 = a[14] ^ d4; a19 = a[19] ^ d4; a24 = a[24] ^ d4
        b0 = a0
        b1 = (a6 << uint64(44)) | (a6 >> uint64(20))
        b2 = (a12 << uint64(43)) | (a12 >> uint64(21))
        b3 = (a18 << uint64(21)) | (a18 >> uint64(43))
        b4 = (a24 << uint64(14)) | (a24 >> uint64(50))
        b5 = (a3 << uint64(28)) | (a3 >> uint64(36))
        b6 = (a9 << uint64(20)) | (a9 >> uint64(44))
        b7 = (a10 << uint64(3)) | (a10 >> uint64(61))
        b8 = (a16 << uint64(45)) | (a16 >> uint64(19))
        b9 = (a22 << uint64(61)) | (a22 >> uint64(3))
        b10 = (a1 << uint64(1)) | (a1 >> uint64(63))
        b11 = (a7 << uint64(6)) | (a7 >> uint64(58))
        b12 = (a13 << uint64(25)) | (a13 >> uint64(39))
        b13 = (a19 << uint64(8)) | (a19 >> uint64(56))
        b14 = (a20 << uint64(18)) | (a20 >> uint64(46))
        b15 = (a4 << uint64(27)) | (a4 >> uint64(37))
        b16 = (a5 << uint64(36)) | (a5 >> uint64(28))
        b17 = (a11 << uint64(10)) | (a11 >> uint64(54))
        b18 = (a17 << uint64(15)) | (a17 >> uint64(49))
        b19 = (a23 << uint64(56)) | (a23 >> uint64(8))
        b20 = (a2 << uint64(62)) | (a2 >> uint64(2))
        b21 = (a8 << uint64(55)) | (a8 >> uint64(9))
        b22 = (a14 << uint64(39)) | (a14 >> uint64(25))
        b23 = (a15 << uint64(41)) | (a15 >> uint64(23))
        b24 = (a21 << uint64(2)) | (a21 >> uint64(62))
        a[0] = b0 ^ (~b1 & b2) ^ rc_table[r]
        a[1] = b1 ^ (~b2 & b3)
        a[2] = b2 ^ (~b3 & b4)
        a[3] = b3 ^ (~b4 & b0)
        a[4] = b4 ^ (~b0 & b1)
        a[5] = b5 ^ (~b6 & b7)
        a[6] = b6 ^ (~b7 & b8)
        a[7] = b7 ^ (~b8 & b9)
        a[8] = b8 ^ (~b9 & b5)
        a[9] = b9 ^ (~b5 & b6)
        a[10] = b10 ^ (~b11 & b12)
        a[11] = b11 ^ (~b12 & b13)
        a[12] = b12 ^ (~b13 & b14)
        a[13] = b13 ^ (~b14 & b10)
        a[14] = b14 ^ (~b10 & b11)
        a[15] = b15 ^ (~b16 & b17)
        a[16] = b16 ^ (~b17 & b18)
        a[17] = b17 ^ (~b18 & b19)
        a[18] = b18 ^ (~b19 & b15)
        a[19] = b19 ^ (~b15 & b16)
        a[20] = b20 ^ (~b21 & b22)
        a[21] = b21 ^ (~b22 & b23)
        a[22] = b22 ^ (~b23 & b24)
        a[23] = b23 ^ (~b24 & b20)
        a[24] = b24 ^ (~b20 & b21)


def keccak256_accel(data: bytes) -> bytes:
    state = np.zeros(25, dtype=np.uint64)
    padded = bytearray(data)
    padded += b"\x01" + b"\x00" * (_RATE - len(padded) % _RATE - 1)
    padded[-1] |= 0x80
    buf = bytes(padded)
    for off in range(0, len(buf), _RATE):
        state[:17] ^= np.frombuffer(buf, dtype="<u8", count=17, offset=off)
        _permute(state, _RC)
    return state[:4].tobytes()
