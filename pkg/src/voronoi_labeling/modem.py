"""Self-similar Voronoi constellation modem over an AWGN channel.

Transmit chain: bits -> Gray -> label z -> ``B U z`` -> reduce ``(. - h)`` into
the r-scaled Voronoi cell -> scale -> IQ pairs.  Receive chain undoes it:
unscale, add h, quantize, ``(B U)^-1`` mod r, Gray -> bits.

Only ``U mod r`` matters for either direction, so the codec works with the
canonical representative and its modular inverse; large integer lifts of U
never enter floating point.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .labeling import bit_width, gray_decode_array, gray_encode_array
from .lattice_core import MarkedLattice, label_of_point, quantize_nearest, voronoi_reduce
from .unimodular_group import UnimodularElement

EXHAUSTIVE_ENERGY_LIMIT = 1 << 24
MONTE_CARLO_ENERGY_SAMPLES = 1 << 20
ENERGY_SEED = 0x5EED
BLOCK_POINTS = 8192
MAX_BITS = 10**9

_energy_cache: dict = {}


@dataclass(frozen=True, eq=False)
class CodecConfig:
    lattice: MarkedLattice
    u: UnimodularElement
    r: int
    scale: float
    _u_can: np.ndarray = field(init=False, repr=False)
    _u_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.u.modulus != self.r or self.u.n != self.lattice.dimension:
            raise ValueError("unimodular does not match lattice dimension / modulus")
        bit_width(self.r)
        object.__setattr__(self, "_u_can", self.u.canonical().astype(float))
        object.__setattr__(self, "_u_inv", self.u.inverse_mod())

    @classmethod
    def build(cls, lattice: MarkedLattice, r: int, u: UnimodularElement | None = None) -> CodecConfig:
        """Config with the energy-normalising scale filled in."""
        if u is None:
            u = UnimodularElement.identity(lattice.dimension, r)
        scale = 1.0 / np.sqrt(average_symbol_energy(lattice, r))
        return cls(lattice, u, r, float(scale))

    @property
    def n(self) -> int:
        return self.lattice.dimension

    @property
    def bits_per_coord(self) -> int:
        return bit_width(self.r)

    @property
    def bits_per_point(self) -> int:
        return self.n * self.bits_per_coord

    @property
    def bits_per_2d(self) -> int:
        return 2 * self.bits_per_coord


def _to_pairs(x: np.ndarray) -> np.ndarray:
    return x[..., 0::2] + 1j * x[..., 1::2]


def _from_pairs(iq: np.ndarray) -> np.ndarray:
    iq = np.asarray(iq)
    out = np.empty(iq.shape[:-1] + (2 * iq.shape[-1],))
    out[..., 0::2] = iq.real
    out[..., 1::2] = iq.imag
    return out


def labels_to_points(labels: np.ndarray, cfg: CodecConfig) -> np.ndarray:
    """Unscaled constellation points ``reduce(B U z - h)`` for integer labels."""
    lat = cfg.lattice
    c = (labels @ cfg._u_can.T) @ lat.basis.T
    return voronoi_reduce(lat, c - lat.shift, cfg.r)


def points_to_labels(y: np.ndarray, cfg: CodecConfig) -> np.ndarray:
    """Labels (mod r) of the lattice points nearest to ``y + h``."""
    lat = cfg.lattice
    q = quantize_nearest(lat, y + lat.shift)
    w = label_of_point(lat, q, cfg.r)
    return (w @ cfg._u_inv.T) % cfg.r


def encode(bits, cfg: CodecConfig) -> np.ndarray:
    """Bits ``(..., bits_per_point)`` to IQ pairs ``(..., n/2)`` (complex)."""
    bits = np.asarray(bits)
    if bits.shape[-1] != cfg.bits_per_point:
        raise ValueError(f"expected {cfg.bits_per_point} bits per point, got {bits.shape[-1]}")
    single = bits.ndim == 1
    z = gray_encode_array(np.atleast_2d(bits), cfg.bits_per_coord)
    t = labels_to_points(z, cfg) * cfg.scale
    iq = _to_pairs(t)
    return iq[0] if single else iq


def decode(frame, cfg: CodecConfig) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.shape[-1] != cfg.n // 2:
        raise ValueError(f"expected {cfg.n // 2} IQ pairs per point")
    single = frame.ndim == 1
    y = _from_pairs(np.atleast_2d(frame)) / cfg.scale
    z = points_to_labels(y, cfg)
    bits = gray_decode_array(z, cfg.bits_per_coord)
    return bits[0] if single else bits


def average_symbol_energy(lattice: MarkedLattice, r: int) -> float:
    """Mean energy per IQ pair of the unscaled constellation.

    Independent of U: relabelling permutes points without moving them.
    """
    key = (lattice.id, r, lattice.basis.tobytes(), lattice.shift.tobytes())
    if key in _energy_cache:
        return _energy_cache[key]
    n = lattice.dimension
    total_points = r**n
    if total_points <= EXHAUSTIVE_ENERGY_LIMIT:
        acc = 0.0
        chunk = 1 << 18
        for start in range(0, total_points, chunk):
            idx = np.arange(start, min(start + chunk, total_points))
            labels = np.stack(np.unravel_index(idx, (r,) * n), axis=-1)
            acc += _energy_sum(lattice, labels, r)
        energy = acc / total_points
    else:
        rng = np.random.default_rng(ENERGY_SEED)
        labels = rng.integers(0, r, size=(MONTE_CARLO_ENERGY_SAMPLES, n))
        energy = _energy_sum(lattice, labels, r) / MONTE_CARLO_ENERGY_SAMPLES
    _energy_cache[key] = energy
    return energy


def _energy_sum(lattice, labels, r) -> float:
    p = labels @ lattice.basis.T - lattice.shift
    # only the norm is needed, so boundary ties need not be resolved
    t = p - r * quantize_nearest(lattice, p / r, resolve_ties=False)
    return float(np.sum(t**2)) / (lattice.dimension / 2)


def noise_variance(ebn0_db: float, cfg: CodecConfig) -> float:
    """Per-real-coordinate noise variance N0/2 for unit energy per IQ pair."""
    n0 = 1.0 / (10 ** (ebn0_db / 10) * cfg.bits_per_2d)
    return n0 / 2


def awgn(frame, ebn0_db: float, cfg: CodecConfig, rng: np.random.Generator) -> np.ndarray:
    frame = np.asarray(frame)
    sigma = np.sqrt(noise_variance(ebn0_db, cfg))
    noise = rng.normal(0.0, sigma, size=frame.shape + (2,))
    return frame + noise[..., 0] + 1j * noise[..., 1]


@dataclass
class ChannelStats:
    ebn0_db: float
    bits_sent: int = 0
    bit_errors: int = 0
    points_sent: int = 0
    lattice_errors: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else float("nan")

    @property
    def ler(self) -> float:
        return self.lattice_errors / self.points_sent if self.points_sent else float("nan")

    def add(self, bits: int, bit_err: int, points: int, lat_err: int):
        self.bits_sent += bits
        self.bit_errors += bit_err
        self.points_sent += points
        self.lattice_errors += lat_err


def _run_block(args) -> tuple[int, int, int, int]:
    cfg, ebn0_db, rng_seed, block = args
    rng = np.random.default_rng([rng_seed, block])
    bits = rng.integers(0, 2, size=(BLOCK_POINTS, cfg.bits_per_point), dtype=np.int8)
    rx = decode(awgn(encode(bits, cfg), ebn0_db, cfg, rng), cfg)
    wrong = rx != bits
    return bits.size, int(wrong.sum()), BLOCK_POINTS, int(np.any(wrong, axis=1).sum())


def run_trials(
    cfg: CodecConfig,
    ebn0_db: float,
    min_bits: int,
    min_errors: int,
    rng_seed: int,
    workers: int = 1,
) -> ChannelStats:
    """Monte Carlo bit and lattice error counts at one Eb/N0.

    Work is cut into fixed blocks, block b drawing from the stream
    ``(rng_seed, b)``; blocks are accumulated in order and the run stops at
    the first block after which both ``min_bits`` and ``min_errors`` are met.
    The counts therefore do not depend on ``workers``.
    """
    if min_bits < cfg.bits_per_point:
        raise ValueError("min_bits must cover at least one point")
    stats = ChannelStats(float(ebn0_db))

    def done():
        return (stats.bits_sent >= min_bits and stats.bit_errors >= min_errors) or (
            stats.bits_sent >= MAX_BITS
        )

    block = 0
    if workers <= 1:
        while not done():
            stats.add(*_run_block((cfg, ebn0_db, rng_seed, block)))
            block += 1
        return stats

    with ProcessPoolExecutor(max_workers=workers) as pool:
        while not done():
            wave = [(cfg, ebn0_db, rng_seed, block + i) for i in range(workers)]
            for result in pool.map(_run_block, wave):
                if done():
                    break
                stats.add(*result)
            block += workers
    return stats


def default_workers() -> int:
    return max(1, len(os.sched_getaffinity(0)))


def snr_at_ber(ebn0_db, ber, target: float) -> float:
    """Eb/N0 where a BER curve crosses ``target`` (linear in dB, log in BER)."""
    x = np.asarray(ebn0_db, dtype=float)
    y = np.log10(np.asarray(ber, dtype=float))
    t = np.log10(target)
    for k in range(len(x) - 1):
        if (y[k] - t) * (y[k + 1] - t) <= 0 and y[k] != y[k + 1]:
            return float(x[k] + (t - y[k]) * (x[k + 1] - x[k]) / (y[k + 1] - y[k]))
    raise ValueError(f"curve does not cross BER {target:g}")


def snr_grid(start: float, stop: float, step: float) -> list[float]:
    if step <= 0 or stop < start:
        raise ValueError("need step > 0 and start <= stop")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 10) for k in range(count)]


def ber_sweep(cfg, snrs, min_bits, min_errors, rng_seed, workers=1) -> list[ChannelStats]:
    return [run_trials(cfg, s, min_bits, min_errors, rng_seed, workers) for s in snrs]
