"""Gray labels, neighbor label offsets and the Hamming density of a marked lattice.

A constellation point with integer label ``z`` (mod r) is transmitted as the
bits obtained by Gray-decoding every coordinate of ``z``.  Coordinate value
``k`` carries the bit pattern ``k ^ (k >> 1)`` (MSB first), so consecutive
integers, including the wrap ``r-1 -> 0``, differ in exactly one bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import comb

import numpy as np

from . import intmat
from .lattice_core import TOL, MarkedLattice, minimal_vectors, quantize_nearest, voronoi_reduce


def bit_width(r: int) -> int:
    m = int(r).bit_length() - 1
    if r < 2 or (1 << m) != r:
        raise ValueError(f"modulus must be a power of two >= 2, got {r}")
    return m


# --------------------------------------------------------------------------
# Gray map


def gray_encode(bits) -> int:
    """Integer whose Gray pattern is ``bits`` (MSB first)."""
    value = 0
    for b in bits:
        value = (value << 1) | (int(b) & 1)
    # inverse of k -> k ^ (k >> 1): prefix xor
    out = 0
    while value:
        out ^= value
        value >>= 1
    return out


def gray_decode(k: int, m: int) -> list[int]:
    """Gray bit pattern of integer ``k`` as ``m`` bits, MSB first."""
    if not 0 <= k < (1 << m):
        raise ValueError(f"{k} out of range for {m} bits")
    g = k ^ (k >> 1)
    return [(g >> (m - 1 - i)) & 1 for i in range(m)]


def gray_encode_array(bits: np.ndarray, m: int) -> np.ndarray:
    """Vectorised :func:`gray_encode` over the last axis split in groups of m bits.

    ``bits`` has shape ``(..., n*m)``; returns integers of shape ``(..., n)``.
    """
    bits = np.asarray(bits, dtype=np.int64)
    grouped = bits.reshape(bits.shape[:-1] + (-1, m))
    weights = 1 << np.arange(m - 1, -1, -1)
    value = grouped @ weights
    out = value.copy()
    shift = value >> 1
    while np.any(shift):
        out ^= shift
        shift >>= 1
    return out


def gray_decode_array(z: np.ndarray, m: int) -> np.ndarray:
    """Inverse of :func:`gray_encode_array`; returns bits of shape ``(..., n*m)``."""
    z = np.asarray(z, dtype=np.int64)
    g = z ^ (z >> 1)
    bits = (g[..., None] >> np.arange(m - 1, -1, -1)) & 1
    return bits.reshape(z.shape[:-1] + (-1,))


def weight_table(r: int) -> np.ndarray:
    """Number of ones in the Gray pattern of each integer 0..r-1."""
    k = np.arange(r)
    g = k ^ (k >> 1)
    return np.array([bin(int(x)).count("1") for x in g], dtype=np.int64)


# --------------------------------------------------------------------------
# neighbor offsets and Hamming density


@dataclass(frozen=True, eq=False)
class NeighborOffsetSet:
    """Label differences (mod r) from a point to each of its nearest neighbors.

    Stored as rows; kept as a multiset so the count always equals the kissing
    number even when offsets coincide modulo r.
    """

    offsets: np.ndarray
    r: int

    def __post_init__(self):
        off = np.mod(np.asarray(self.offsets, dtype=np.int64), self.r)
        off.flags.writeable = False
        object.__setattr__(self, "offsets", off)

    @property
    def n(self) -> int:
        return self.offsets.shape[1]

    def __len__(self):
        return len(self.offsets)

    def as_set(self) -> set[tuple[int, ...]]:
        return {tuple(int(x) for x in row) for row in self.offsets}


@total_ordering
@dataclass(frozen=True)
class HammingDensity:
    """Average number of label bit differences to a nearest neighbor."""

    total_bit_diffs: int
    neighbor_count: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.total_bit_diffs, self.neighbor_count)

    def __float__(self):
        return self.total_bit_diffs / self.neighbor_count

    def __eq__(self, other):
        if isinstance(other, HammingDensity):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, HammingDensity):
            return self.value < other.value
        if isinstance(other, (int, Fraction)):
            return self.value < other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return f"{self.total_bit_diffs}/{self.neighbor_count} = {float(self):.4f}"


def neighbor_offsets_standard(lat: MarkedLattice, r: int) -> NeighborOffsetSet:
    """Label offsets of the nearest neighbors under the lattice's own basis."""
    if r < 2:
        raise ValueError("r must be at least 2")
    coeffs = minimal_vectors(lat) @ lat.basis_inv.T
    rounded = np.round(coeffs)
    if np.max(np.abs(coeffs - rounded)) > TOL:
        raise ValueError("minimal vectors are not integral in this basis")
    return NeighborOffsetSet(rounded.astype(np.int64), r)


def _entries(u):
    return getattr(u, "entries", u)


def neighbor_offsets_sheared(rs: NeighborOffsetSet, u) -> NeighborOffsetSet:
    """Offsets after relabelling by the unimodular ``u`` (basis ``B @ u``).

    A point with label ``a`` under ``B`` has label ``u^-1 a`` under ``B u``.
    """
    inv = np.array(intmat.inverse_unimodular(_entries(u)), dtype=object)
    if inv.shape != (rs.n, rs.n):
        raise ValueError("dimension mismatch between offsets and unimodular")
    inv = (inv % rs.r).astype(np.int64)
    return NeighborOffsetSet(rs.offsets @ inv.T, rs.r)


def hamming_density(ru: NeighborOffsetSet) -> HammingDensity:
    """Bit differences between the zero label and each neighbor label."""
    bit_width(ru.r)
    total = int(weight_table(ru.r)[ru.offsets].sum())
    return HammingDensity(total, len(ru))


def greedy_weight_profile(n: int, kissing: int) -> list[int]:
    """Labels taken at Hamming weight 1, 2, ... when filling ``kissing`` slots greedily."""
    capacity = sum(comb(n, w) * 2**w for w in range(1, n + 1))
    if kissing > capacity:
        raise ValueError(f"{kissing} neighbors exceed the {capacity} available labels")
    taken = []
    left = kissing
    for w in range(1, n + 1):
        if left == 0:
            break
        t = min(left, comb(n, w) * 2**w)
        taken.append(t)
        left -= t
    return taken


def theoretical_hd_bound(n: int, kissing: int) -> HammingDensity:
    taken = greedy_weight_profile(n, kissing)
    return HammingDensity(sum(w * t for w, t in enumerate(taken, start=1)), kissing)


# --------------------------------------------------------------------------
# brute-force oracle

ORACLE_MAX_POINTS = 1 << 12


def constellation(lat: MarkedLattice, u, r: int) -> tuple[np.ndarray, np.ndarray]:
    """All labels ``z`` in {0..r-1}^n and their reduced points ``reduce(B u z - h)``."""
    n = lat.dimension
    labels = np.array(list(itertools.product(range(r), repeat=n)), dtype=np.int64)
    bu = lat.basis @ np.array(_entries(u), dtype=float)
    pts = voronoi_reduce(lat, labels @ bu.T - lat.shift, r)
    return labels, pts


def hd_brute_force_oracle(
    lat: MarkedLattice, u, r: int, strict: bool = True, return_per_point: bool = False
):
    """Hamming density measured geometrically over the whole constellation.

    Every pair of constellation points is compared by wrapped distance
    (difference reduced into the r-scaled Voronoi cell); the closest ones are
    the neighbors.  With ``strict`` it asserts that every point sees the same
    number of bit differences; otherwise the constellation average is returned.
    """
    m = bit_width(r)
    n = lat.dimension
    if r**n > ORACLE_MAX_POINTS:
        raise ValueError(f"constellation of {r**n} points is too large for the oracle")
    labels, pts = constellation(lat, u, r)
    bits = gray_decode_array(labels, m)
    count = len(pts)
    per_point = np.empty(count, dtype=np.int64)
    neighbors = np.empty(count, dtype=np.int64)
    for i in range(count):
        diff = pts - pts[i]
        diff = diff - r * quantize_nearest(lat, diff / r, resolve_ties=False)
        d = np.sum(diff**2, axis=1)
        d[i] = np.inf
        near = np.abs(d - d.min()) <= 1e-7
        neighbors[i] = near.sum()
        per_point[i] = np.sum(bits[near] != bits[i])
    if np.any(neighbors != neighbors[0]):
        raise AssertionError("neighbor count varies across the constellation")
    if strict and np.any(per_point != per_point[0]):
        raise AssertionError("bit-difference count varies across the constellation")
    if np.all(per_point == per_point[0]):
        hd = HammingDensity(int(per_point[0]), int(neighbors[0]))
    else:
        hd = HammingDensity(int(per_point.sum()), int(neighbors.sum()))
    if return_per_point:
        return hd, per_point, neighbors
    return hd
