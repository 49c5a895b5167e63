"""Seeded, reproducible random generation for every catalog family.

The raw generator is splitmix64, implemented here rather than taken from a
library so the exact stream is pinned by this file alone and reproducible
in any language:

    state_k = seed + (k+1) * 0x9E3779B97F4A7C15      (mod 2^64)
    out_k   = mix(state_k)
    mix(z):  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
             z ^= z >> 27;  z *= 0x94D049BB133111EB
             z ^= z >> 31

Because output k is a pure function of (seed, k) the whole stream
vectorizes; test vectors live in tests/golden/specfun_golden.json
(seed 0 starts e220a8397b1dcdaf, 6e789e6aa1b965f4, ...).

Derived variates consume the raw stream in a fixed documented order:

* uniform:  1 raw word, ((raw >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
* normal:   2 raw words (Box-Muller, cosine branch only)
* gamma shape >= 1: Marsaglia-Tsang trials; trial j consumes exactly the
  raw words 3j, 3j+1, 3j+2 (normal from the first two, acceptance uniform
  from the third) and the outputs are the accepted subsequence, so the
  draw sequence is independent of internal batching
* gamma shape < 1: all n draws at shape+1 first, then n boost uniforms

Compound families draw speckle from the stream seeded with ``seed`` and
texture from the stream seeded with ``seed XOR TEXTURE_SEED_XOR``, so the
component batches can be reproduced standalone with those seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dist

__all__ = ["SplitMix64", "SampleBatch", "sample", "sample_compound",
           "SPLITMIX64_GAMMA", "TEXTURE_SEED_XOR"]

SPLITMIX64_GAMMA = 0x9E3779B97F4A7C15
# arbitrary fixed odd constant splitting speckle and texture streams
TEXTURE_SEED_XOR = 0x5851F42D4C957F2D
_MASK64 = (1 << 64) - 1
_INV_2_53 = 2.0 ** -53
_TWO_PI = 2.0 * math.pi


class SplitMix64:
    """Counter-based splitmix64 stream over numpy uint64."""

    def __init__(self, seed: int):
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise ValueError(f"seed must be an integer, got {seed!r}")
        self.seed = int(seed) & _MASK64
        self.position = 0

    def raw(self, n: int) -> np.ndarray:
        """Next n raw 64-bit words."""
        idx = np.arange(self.position + 1, self.position + n + 1,
                        dtype=np.uint64)
        self.position += n
        z = np.uint64(self.seed) + idx * np.uint64(SPLITMIX64_GAMMA)
        z ^= z >> np.uint64(30)
        z *= np.uint64(0xBF58476D1CE4E5B9)
        z ^= z >> np.uint64(27)
        z *= np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
        return z

    @staticmethod
    def _to_uniform(raw: np.ndarray) -> np.ndarray:
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53

    def uniform_open(self, n: int) -> np.ndarray:
        """n uniforms strictly inside (0, 1)."""
        return self._to_uniform(self.raw(n))

    def normals(self, n: int) -> np.ndarray:
        """n standard normals; consumes 2n raw words."""
        u = self.uniform_open(2 * n)
        return np.sqrt(-2.0 * np.log(u[0::2])) * np.cos(_TWO_PI * u[1::2])

    def gammas(self, shape: float, n: int) -> np.ndarray:
        """n gamma(shape, scale=1) draws."""
        if shape < 1.0:
            # boost transform: draw at shape+1, multiply by U^(1/shape)
            base = self.gammas(shape + 1.0, n)
            return base * self.uniform_open(n) ** (1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        out = np.empty(n)
        filled = 0
        while filled < n:
            trials = n - filled
            raw = self.raw(3 * trials)
            u1 = self._to_uniform(raw[0::3])
            u2 = self._to_uniform(raw[1::3])
            u = self._to_uniform(raw[2::3])
            x = np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)
            v = (1.0 + c * x) ** 3
            ok = v > 0.0
            accept = np.zeros(trials, dtype=bool)
            accept[ok] = np.log(u[ok]) < (0.5 * x[ok] ** 2 + d - d * v[ok]
                                          + d * np.log(v[ok]))
            got = d * v[accept]
            out[filled:filled + got.size] = got
            filled += got.size
        return out


@dataclass(frozen=True)
class SampleBatch:
    """Generated observations plus, for compound draws, the hidden texture."""
    family: dist.DistributionSpec | None
    seed: int
    values: np.ndarray
    texture: np.ndarray | None = None

    def __post_init__(self):
        self.values.flags.writeable = False
        if self.texture is not None:
            self.texture.flags.writeable = False
            if self.texture.shape != self.values.shape:
                raise ValueError("texture must match values in length")


def _draw_simple(spec: dist.DistributionSpec, stream: SplitMix64,
                 n: int) -> np.ndarray:
    match spec:
        case dist.GammaPower(L=L, mu=mu):
            return (mu / L) * stream.gammas(L, n)
        case dist.Nakagami(L=L, mu=mu):
            return mu * np.sqrt(stream.gammas(L, n) / L)
        case dist.Maxwell(sigma=sigma):
            z = stream.normals(3 * n)
            return sigma * np.sqrt(z[0::3] ** 2 + z[1::3] ** 2 + z[2::3] ** 2)
        case dist.Weibull(z=z, b=b):
            return z * (-np.log(stream.uniform_open(n))) ** (1.0 / b)
        case dist.Rayleigh(z=z):
            return _draw_simple(dist.Weibull(z, 2.0), stream, n)
        case dist.InverseGamma(shape=a, scale=scale):
            return scale / stream.gammas(a, n)
    raise TypeError(f"not a simple family: {spec!r}")


def _check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"sample count must be an integer >= 1, got {n!r}")
    return int(n)


def sample(spec: dist.DistributionSpec, n: int, seed: int) -> SampleBatch:
    """n independent draws; deterministic for fixed (spec, n, seed).

    Compound families draw hidden texture z and speckle u on split streams
    and return x = u * z with the texture retained in the batch.
    """
    n = _check_n(n)
    comps = dist.components(spec)
    if comps is None:
        stream = SplitMix64(seed)
        values = _draw_simple(spec, stream, n)
        return SampleBatch(spec, stream.seed, values)
    batch = sample_compound(*comps, n, seed)
    return SampleBatch(spec, batch.seed, np.array(batch.values),
                       np.array(batch.texture))


def sample_compound(speckle: dist.DistributionSpec,
                    texture: dist.DistributionSpec,
                    n: int, seed: int) -> SampleBatch:
    """Product-model draws x_i = u_i * z_i from two simple component families.

    The speckle stream is seeded with ``seed`` and the texture stream with
    ``seed XOR TEXTURE_SEED_XOR``, so each factor batch is reproducible on
    its own.
    """
    n = _check_n(n)
    for part, name in ((speckle, "speckle"), (texture, "texture")):
        if dist.components(part) is not None:
            raise ValueError(
                f"{name} component must be a simple family, got "
                f"{dist.family_tag(part)}"
            )
    speckle_stream = SplitMix64(seed)
    texture_stream = SplitMix64(speckle_stream.seed ^ TEXTURE_SEED_XOR)
    u = _draw_simple(speckle, speckle_stream, n)
    z = _draw_simple(texture, texture_stream, n)
    return SampleBatch(None, speckle_stream.seed, u * z, z)
