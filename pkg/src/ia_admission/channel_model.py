"""Random block-fading MIMO interference channel and network configuration.

The network holds ``K_a`` active transmit/receive pairs followed by ``K_s``
secondary pairs. User indices are 0-based: users ``0 .. K_a-1`` are active,
``K_a .. K_a+K_s-1`` are secondary. Every cross channel ``H[(i, k)]`` maps
transmitter ``k`` to receiver ``i`` and has i.i.d. CN(0,1) entries.

Reproducibility contract: ``generate_network`` is a pure function of the
configuration (including its ``seed``), and Monte Carlo sweeps derive each
trial's channel seed with :func:`subseed`, so any single trial can be
regenerated in isolation and trials may run in parallel without sharing RNG
state.
"""

import zlib
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import ConfigurationError
from .linalg import crandn, rank_from_singular_values

__all__ = ["NetworkConfig", "ChannelSet", "generate_network", "subseed", "trial_rng"]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NetworkConfig:
    """Dimensions, SNR and seed of one network scenario.

    Attributes
    ----------
    K_a, M_a, N_a, d_a : int
        Active pair count, transmit/receive antennas and streams per pair.
    K_s, M_s, N_s, d_s : int
        Same for the secondary pairs (ignored when ``K_s == 0``).
    gamma_o_db : float
        Per-user transmit SNR P/sigma^2 in dB.
    seed : int
        64-bit base seed for channel generation.
    """

    K_a: int = 3
    M_a: int = 2
    N_a: int = 2
    d_a: int = 1
    K_s: int = 0
    M_s: int = 0
    N_s: int = 0
    d_s: int = 1
    gamma_o_db: float = 20.0
    seed: int = 0

    def __post_init__(self):
        for name in ("K_a", "M_a", "N_a", "d_a", "K_s", "M_s", "N_s", "d_s"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.K_a > 0 and self.d_a > min(self.M_a, self.N_a):
            raise ConfigurationError(
                f"d_a={self.d_a} exceeds min(M_a, N_a)={min(self.M_a, self.N_a)}"
            )
        if self.K_s > 0 and self.d_s > min(self.M_s, self.N_s):
            raise ConfigurationError(
                f"d_s={self.d_s} exceeds min(M_s, N_s)={min(self.M_s, self.N_s)}"
            )

    @property
    def K(self):
        return self.K_a + self.K_s

    @property
    def gamma_o(self):
        """Linear per-user transmit SNR."""
        return float(10.0 ** (self.gamma_o_db / 10.0))

    def tx_antennas(self, k):
        return self.M_a if k < self.K_a else self.M_s

    def rx_antennas(self, k):
        return self.N_a if k < self.K_a else self.N_s

    def streams(self, k):
        return self.d_a if k < self.K_a else self.d_s

    def active_dims(self):
        """Per-active-user (M, N, d) triples, e.g. for properness counting."""
        return [(self.M_a, self.N_a, self.d_a)] * self.K_a

    def with_seed(self, seed):
        return replace(self, seed=int(seed) & _MASK64)


class ChannelSet:
    """All cross channels of one network realization, keyed by (rx, tx).

    Immutable after construction; safe to share across trial workers.
    """

    def __init__(self, config, matrices):
        self.config = config
        self._H = dict(matrices)
        for (i, k), h in self._H.items():
            expected = (config.rx_antennas(i), config.tx_antennas(k))
            if h.shape != expected:
                raise ConfigurationError(
                    f"channel ({i},{k}) has shape {h.shape}, expected {expected}"
                )
            h.setflags(write=False)

    def __getitem__(self, key):
        return self._H[key]

    def items(self):
        return self._H.items()


def subseed(base_seed, *parts):
    """Derive an independent 64-bit sub-seed from a base seed and labels.

    String parts are folded through CRC32 so e.g. a strategy name can key its
    own stream. The derivation uses ``numpy.random.SeedSequence``, giving
    well-separated streams for Monte Carlo trials.
    """
    entropy = [int(base_seed) & _MASK64]
    for p in parts:
        entropy.append(zlib.crc32(p.encode()) if isinstance(p, str) else int(p) & _MASK64)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def trial_rng(base_seed, *parts):
    """Generator seeded by :func:`subseed`; the per-trial RNG of the sweeps."""
    return np.random.default_rng(subseed(base_seed, *parts))


def generate_network(config, max_redraws=16):
    """Draw a full set of i.i.d. CN(0,1) channels for ``config``.

    Every matrix is checked for full rank (rank equal to its smaller
    dimension) through an SVD with tolerance max(dim)*eps*s_max; the
    measure-zero failures are redrawn from the same stream.
    """
    if config.K_a < 1 and config.K_s < 1:
        raise ConfigurationError("network needs at least one user pair")
    rng = trial_rng(config.seed)
    matrices = {}
    total = config.K
    for i in range(total):
        for k in range(total):
            shape = (config.rx_antennas(i), config.tx_antennas(k))
            for _ in range(max_redraws):
                h = crandn(rng, *shape)
                s = np.linalg.svd(h, compute_uv=False)
                if rank_from_singular_values(s, shape) == min(shape):
                    break
            else:
                raise ConfigurationError(
                    f"could not draw a full-rank {shape} channel for ({i},{k})"
                )
            matrices[(i, k)] = h
    return ChannelSet(config, matrices)
