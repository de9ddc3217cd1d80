"""Deterministic pseudo-random streams for the reference training backend.

The generator is splitmix64: state advances by a fixed odd constant and
each output is an avalanche mix of the state. Because the mix scrambles
the state thoroughly, seeds that differ by small offsets (seed, seed+1,
seed+2, ...) give decorrelated streams; that is the split rule used to
derive child streams (e.g. the validation-split stream is seed+1).

Gaussians come from the Box-Muller transform applied to uniform pairs.
All draws are reproducible within this implementation; bit-equality of
the float streams with other implementations is not a goal.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """splitmix64 output function on a plain Python integer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 arithmetic wraps modulo 2**64, which is exactly what we need
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class Rng:
    """A single splitmix64 stream.

    The k-th word of the stream is mix64(seed + k*GOLDEN), so any block
    of draws can be produced vectorized without replaying the scalar
    state machine.
    """

    def __init__(self, seed: int):
        self._seed = int(seed) & _MASK64
        self._drawn = 0  # 64-bit words consumed so far

    def next_u64(self) -> int:
        self._drawn += 1
        return mix64((self._seed + self._drawn * _GOLDEN) & _MASK64)

    def _words(self, n: int) -> np.ndarray:
        idx = np.arange(self._drawn + 1, self._drawn + n + 1, dtype=np.uint64)
        self._drawn += n
        states = np.uint64(self._seed) + idx * np.uint64(_GOLDEN)
        return _mix64_array(states)

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles in [0, 1), 53-bit resolution."""
        return (self._words(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def gaussians(self, shape: int | tuple[int, ...]) -> np.ndarray:
        """Standard normals via Box-Muller, filled in row-major order.

        Draws ceil(n/2) uniform pairs; pair i uses words (2i, 2i+1) of the
        stream. The radius uniform is shifted into (0, 1] so log() is safe.
        """
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        n = int(np.prod(shape)) if shape else 1
        if n == 0:
            return np.zeros(shape, dtype=np.float64)
        m = (n + 1) // 2
        words = self._words(2 * m).reshape(m, 2)
        u1 = ((words[:, 0] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (words[:, 1] >> np.uint64(11)).astype(np.float64) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * m, dtype=np.float64)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n].reshape(shape)

    def uniform_signed(self, shape: int | tuple[int, ...], scale: float) -> np.ndarray:
        """Uniform draws in [-scale, +scale)."""
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        n = int(np.prod(shape)) if shape else 1
        u = self.uniforms(n)
        return ((2.0 * u - 1.0) * scale).reshape(shape)

    def shuffle(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of range(n).

        Index draws use next_u64() % k; the modulo bias is negligible for
        the desk-scale n this backend handles.
        """
        perm = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = self.next_u64() % (i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm
