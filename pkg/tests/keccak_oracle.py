"""Independent keccak-256 oracle for the test suite.

Textbook translation of the sponge: 5x5 state addressed by (x, y) tuples,
rho offsets computed from the t-walk rather than a table, explicit pi
permutation. Deliberately structured nothing like the package's flattened
implementation so that agreement between the two is meaningful.
"""

MASK = (1 << 64) - 1

ROUND_CONSTANTS = [
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
]

RATE = 136


def _rotl(value: int, amount: int) -> int:
    amount %= 64
    if amount == 0:
        return value
    return ((value << amount) | (value >> (64 - amount))) & MASK


def _rho_offsets() -> dict:
    offsets = {(0, 0): 0}
    x, y = 1, 0
    for t in range(24):
        offsets[(x, y)] = ((t + 1) * (t + 2) // 2) % 64
        x, y = y, (2 * x + 3 * y) % 5
    return offsets


_OFFSETS = _rho_offsets()


def _permute(state: dict) -> dict:
    for rc in ROUND_CONSTANTS:
        parity = {x: state[(x, 0)] ^ state[(x, 1)] ^ state[(x, 2)]
                  ^ state[(x, 3)] ^ state[(x, 4)] for x in range(5)}
        theta = {x: parity[(x - 1) % 5] ^ _rotl(parity[(x + 1) % 5], 1) for x in range(5)}
        state = {(x, y): state[(x, y)] ^ theta[x] for x in range(5) for y in range(5)}
        rotated = {}
        for x in range(5):
            for y in range(5):
                rotated[(y, (2 * x + 3 * y) % 5)] = _rotl(state[(x, y)], _OFFSETS[(x, y)])
        state = {
            (x, y): rotated[(x, y)] ^ ((rotated[((x + 1) % 5, y)] ^ MASK) & rotated[((x + 2) % 5, y)])
            for x in range(5) for y in range(5)
        }
        state[(0, 0)] ^= rc
    return state


def keccak256(data: bytes) -> bytes:
    padded = bytearray(data)
    pad_len = RATE - (len(padded) % RATE)
    padded += b"\x01" + b"\x00" * (pad_len - 1)
    padded[-1] |= 0x80

    state = {(x, y): 0 for x in range(5) for y in range(5)}
    for offset in range(0, len(padded), RATE):
        for i in range(RATE // 8):
            lane = int.from_bytes(padded[offset + 8 * i:offset + 8 * i + 8], "little")
            state[(i % 5, i // 5)] ^= lane
        state = _permute(state)

    return b"".join(state[(i % 5, i // 5)].to_bytes(8, "little") for i in range(4))
