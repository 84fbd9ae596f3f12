"""keccak-256 (the pre-NIST padding variant used by the EVM, domain byte 0x01).

Everything in this package that hashes goes through :func:`keccak256`. The
default backend is pure Python and dependency-free; bulk callers (test
harnesses, log reconstruction over large files) can opt into a JIT-compiled
backend via :func:`enable_acceleration`, which is a no-op when numba is not
installed. Both backends compute the same function and the accelerated one is
self-tested against pinned vectors before it is switched in.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1

_ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

_RATE = 136  # bytes absorbed per permutation at 256-bit output


def _permute(lanes: list[int]) -> list[int]:
    """keccak-f[1600]. Lanes are row-major (index = 5*y + x), hand-unrolled."""
    (a00, a01, a02, a03, a04,
     a05, a06, a07, a08, a09,
     a10, a11, a12, a13, a14,
     a15, a16, a17, a18, a19,
     a20, a21, a22, a23, a24) = lanes
    for rc in _ROUND_CONSTANTS:
        # theta
        c0 = a00 ^ a05 ^ a10 ^ a15 ^ a20
        c1 = a01 ^ a06 ^ a11 ^ a16 ^ a21
        c2 = a02 ^ a07 ^ a12 ^ a17 ^ a22
        c3 = a03 ^ a08 ^ a13 ^ a18 ^ a23
        c4 = a04 ^ a09 ^ a14 ^ a19 ^ a24
        d0 = c4 ^ (((c1 << 1) | (c1 >> 63)) & _MASK)
        d1 = c0 ^ (((c2 << 1) | (c2 >> 63)) & _MASK)
        d2 = c1 ^ (((c3 << 1) | (c3 >> 63)) & _MASK)
        d3 = c2 ^ (((c4 << 1) | (c4 >> 63)) & _MASK)
        d4 = c3 ^ (((c0 << 1) | (c0 >> 63)) & _MASK)
        a00 ^= d0; a05 ^= d0; a10 ^= d0; a15 ^= d0; a20 ^= d0
        a01 ^= d1; a06 ^= d1; a11 ^= d1; a16 ^= d1; a21 ^= d1
        a02 ^= d2; a07 ^= d2; a12 ^= d2; a17 ^= d2; a22 ^= d2
        a03 ^= d3; a08 ^= d3; a13 ^= d3; a18 ^= d3; a23 ^= d3
        a04 ^= d4; a09 ^= d4; a14 ^= d4; a19 ^= d4; a24 ^= d4
        # rho + pi: b[y][(2x+3y)%5] = rotl(a[x][y], offset[x][y])
        b00 = a00
        b01 = ((a06 << 44) | (a06 >> 20)) & _MASK
        b02 = ((a12 << 43) | (a12 >> 21)) & _MASK
        b03 = ((a18 << 21) | (a18 >> 43)) & _MASK
        b04 = ((a24 << 14) | (a24 >> 50)) & _MASK
        b05 = ((a03 << 28) | (a03 >> 36)) & _MASK
        b06 = ((a09 << 20) | (a09 >> 44)) & _MASK
        b07 = ((a10 << 3) | (a10 >> 61)) & _MASK
        b08 = ((a16 << 45) | (a16 >> 19)) & _MASK
        b09 = ((a22 << 61) | (a22 >> 3)) & _MASK
        b10 = ((a01 << 1) | (a01 >> 63)) & _MASK
        b11 = ((a07 << 6) | (a07 >> 58)) & _MASK
        b12 = ((a13 << 25) | (a13 >> 39)) & _MASK
        b13 = ((a19 << 8) | (a19 >> 56)) & _MASK
        b14 = ((a20 << 18) | (a20 >> 46)) & _MASK
        b15 = ((a04 << 27) | (a04 >> 37)) & _MASK
        b16 = ((a05 << 36) | (a05 >> 28)) & _MASK
        b17 = ((a11 << 10) | (a11 >> 54)) & _MASK
        b18 = ((a17 << 15) | (a17 >> 49)) & _MASK
        b19 = ((a23 << 56) | (a23 >> 8)) & _MASK
        b20 = ((a02 << 62) | (a02 >> 2)) & _MASK
        b21 = ((a08 << 55) | (a08 >> 9)) & _MASK
        b22 = ((a14 << 39) | (a14 >> 25)) & _MASK
        b23 = ((a15 << 41) | (a15 >> 23)) & _MASK
        b24 = ((a21 << 2) | (a21 >> 62)) & _MASK
        # chi + iota
        a00 = b00 ^ (~b01 & b02) ^ rc
        a01 = b01 ^ (~b02 & b03)
        a02 = b02 ^ (~b03 & b04)
        a03 = b03 ^ (~b04 & b00)
        a04 = b04 ^ (~b00 & b01)
        a05 = b05 ^ (~b06 & b07)
        a06 = b06 ^ (~b07 & b08)
        a07 = b07 ^ (~b08 & b09)
        a08 = b08 ^ (~b09 & b05)
        a09 = b09 ^ (~b05 & b06)
        a10 = b10 ^ (~b11 & b12)
        a11 = b11 ^ (~b12 & b13)
        a12 = b12 ^ (~b13 & b14)
        a13 = b13 ^ (~b14 & b10)
        a14 = b14 ^ (~b10 & b11)
        a15 = b15 ^ (~b16 & b17)
        a16 = b16 ^ (~b17 & b18)
        a17 = b17 ^ (~b18 & b19)
        a18 = b18 ^ (~b19 & b15)
        a19 = b19 ^ (~b15 & b16)
        a20 = b20 ^ (~b21 & b22)
        a21 = b21 ^ (~b22 & b23)
        a22 = b22 ^ (~b23 & b24)
        a23 = b23 ^ (~b24 & b20)
        a24 = b24 ^ (~b20 & b21)
    return [a00, a01, a02, a03, a04, a05, a06, a07, a08, a09,
            a10, a11, a12, a13, a14, a15, a16, a17, a18, a19,
            a20, a21, a22, a23, a24]


def _pad(data: bytes) -> bytes:
    # pad10*1 with domain byte 0x01 (keccak, not the 0x06 of NIST SHA-3)
    padded = bytearray(data)
    padded += b"\x01" + b"\x00" * (_RATE - len(padded) % _RATE - 1)
    padded[-1] |= 0x80
    return bytes(padded)


def _keccak256_py(data: bytes) -> bytes:
    lanes = [0] * 25
    padded = _pad(data)
    for off in range(0, len(padded), _RATE):
        for i in range(17):
            lanes[i] ^= int.from_bytes(padded[off + 8 * i:off + 8 * i + 8], "little")
        lanes = _permute(lanes)
    return b"".join(lane.to_bytes(8, "little") for lane in lanes[:4])


_impl = _keccak256_py

# Pinned public vectors; also used to self-test the accelerated backend.
SELFTEST_VECTORS = (
    (b"", "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"),
    (b"abc", "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45"),
    (b"\x00" * 32, "290decd9548b62a8d60345a988386fc84ba6bc95484008f6362f93160ef3e563"),
    (b"hello world", "47173285a8d7341e5e972fc677286384f802f8ef42a5ec5f03bbfa254cb01fad"),
)


def keccak256(data: bytes) -> bytes:
    """Return the 32-byte keccak-256 digest of ``data``."""
    return _impl(data)


def acceleration_enabled() -> bool:
    return _impl is not _keccak256_py


def enable_acceleration() -> bool:
    """Swap in the numba-compiled backend if available and correct.

    Returns True when the accelerated backend is active (including when it
    was already active). Safe to call unconditionally: on ImportError or a
    self-test mismatch the pure backend stays in place and False is returned.
    """
    global _impl
    if acceleration_enabled():
        return True
    try:
        from . import _keccak_numba
    except Exception:
        return False
    candidate = _keccak_numba.keccak256_accel
    for data, want in SELFTEST_VECTORS:
        if candidate(data).hex() != want:
            return False
    # one multi-block probe against the pure path
    probe = bytes(range(256)) * 3
    if candidate(probe) != _keccak256_py(probe):
        return False
    _impl = candidate
    return True
