"""The finite group G_n(r) = SL_n(Z) / Gamma_r and Hamming descent over it.

Elements are integer matrices of determinant +-1 kept exactly (Python ints);
two elements are equal in G_n(r) when they agree entrywise modulo r.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import intmat
from .labeling import (
    HammingDensity,
    NeighborOffsetSet,
    hamming_density,
    neighbor_offsets_standard,
    weight_table,
)
from .lattice_core import LatticeId, MarkedLattice

ENUMERATION_LIMIT = 10**6
# short words keep seeds near the standard basis, where the good minima live
SEED_WORD_LENGTH = 2


class UnimodularElement:
    """An integer matrix with determinant +-1 viewed as an element of G_n(r)."""

    __slots__ = ("entries", "modulus", "_key")

    def __init__(self, entries, modulus: int, check: bool = True):
        rows = intmat.as_int_rows(entries)
        if check:
            d = intmat.det(rows)
            if d not in (1, -1):
                raise ValueError(f"matrix is not unimodular (det = {d})")
        self.entries = tuple(tuple(row) for row in rows)
        self.modulus = int(modulus)
        self._key = None

    @classmethod
    def identity(cls, n: int, r: int) -> UnimodularElement:
        return cls(np.eye(n, dtype=int), r, check=False)

    @property
    def n(self) -> int:
        return len(self.entries)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object)

    def canonical(self) -> np.ndarray:
        """Entries reduced into {0, ..., r-1}."""
        return np.array(
            [[x % self.modulus for x in row] for row in self.entries], dtype=np.int64
        )

    def key(self) -> bytes:
        if self._key is None:
            self._key = self.canonical().tobytes()
        return self._key

    def det(self) -> int:
        return intmat.det(self.entries)

    def inverse_mod(self) -> np.ndarray:
        return intmat.inverse_mod(self.entries, self.modulus)

    def digest(self) -> str:
        """Short stable hash of the canonical form."""
        h = hashlib.sha256(f"{self.n}:{self.modulus}:".encode() + self.key())
        return h.hexdigest()[:16]

    def __matmul__(self, other: UnimodularElement) -> UnimodularElement:
        if self.modulus != other.modulus:
            raise ValueError("moduli differ")
        return UnimodularElement(intmat.matmul(self.entries, other.entries), self.modulus, check=False)

    def times_shear(self, i: int, j: int, k: int) -> UnimodularElement:
        """``self @ (I + k E_ij)``: adds k times column i to column j."""
        rows = [list(row) for row in self.entries]
        for row in rows:
            row[j] += k * row[i]
        return UnimodularElement(rows, self.modulus, check=False)

    def __eq__(self, other):
        if not isinstance(other, UnimodularElement):
            return NotImplemented
        return self.modulus == other.modulus and self.n == other.n and self.key() == other.key()

    def __hash__(self):
        return hash((self.modulus, self.key()))

    def __repr__(self):
        return f"UnimodularElement({[list(r) for r in self.entries]}, r={self.modulus})"


def canonicalize(u: UnimodularElement) -> UnimodularElement:
    """Representative with entries in {0..r-1}.

    The result identifies the group element; its integer determinant is only
    +-1 modulo r, so it is not checked.
    """
    return UnimodularElement(u.canonical(), u.modulus, check=False)


def shear_generators(n: int, r: int = 0) -> list[UnimodularElement]:
    """The n(n-1) shears I + E_ij, ordered by (i, j)."""
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                m = np.eye(n, dtype=int)
                m[i, j] = 1
                gens.append(UnimodularElement(m, r, check=False))
    return gens


def generator_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def shear_power(n: int, i: int, j: int, k: int, r: int) -> UnimodularElement:
    m = np.eye(n, dtype=int)
    m[i, j] = k
    return UnimodularElement(m, r, check=False)


def group_order(n: int, r: int) -> int:
    """|SL_n(Z/rZ)|, exactly."""
    if n < 2 or r < 2:
        raise ValueError("need n >= 2 and r >= 2")
    from sympy import primefactors

    order = Fraction(r ** (n * n - 1))
    for p in primefactors(r):
        for k in range(2, n + 1):
            order *= Fraction(p**k - 1, p**k)
    assert order.denominator == 1
    return int(order)


def enumerate_group(n: int, r: int, limit: int = ENUMERATION_LIMIT) -> list[UnimodularElement]:
    """All elements of G_n(r), by breadth-first closure over the shear generators.

    Each element carries the integer lift reached first by the search, so its
    determinant is exactly 1.
    """
    if group_order(n, r) > limit:
        raise ValueError(f"|G_{n}({r})| = {group_order(n, r)} exceeds the enumeration limit")
    pairs = generator_pairs(n)
    frontier = np.eye(n, dtype=np.int64)[None]
    seen = {(frontier[0] % r).tobytes()}
    found = [frontier[0]]
    while len(frontier):
        nxt = []
        for i, j in pairs:
            # right multiplication by I + E_ij adds column i to column j
            prod = frontier.copy()
            prod[:, :, j] += prod[:, :, i]
            for m in prod:
                k = (m % r).tobytes()
                if k not in seen:
                    seen.add(k)
                    nxt.append(m)
        frontier = np.array(nxt, dtype=np.int64).reshape(-1, n, n)
        found.extend(frontier)
        if np.abs(frontier).max(initial=0) > 2**40:
            # keep lifts small; any representative of the coset will do
            raise OverflowError("integer lifts grew too large during enumeration")
    return [UnimodularElement(m, r, check=False) for m in found]


# --------------------------------------------------------------------------
# Hamming density of products, computed incrementally


class _ShearEvaluator:
    """Scores every product ``U G_ij^k`` from the offsets of U.

    Relabelling by ``G_ij^k`` maps an offset column ``a`` to
    ``a - k a_j e_i``, so only coordinate i of each offset changes.
    """

    def __init__(self, rs: NeighborOffsetSet):
        self.rs = rs
        self.r = rs.r
        self.n = rs.n
        self.weights = weight_table(self.r)
        self.pairs = generator_pairs(self.n)
        self.powers = np.arange(1, self.r)

    def offsets(self, u: UnimodularElement) -> np.ndarray:
        inv = u.inverse_mod()
        return (self.rs.offsets @ inv.T) % self.r

    def product_totals(self, off: np.ndarray) -> np.ndarray:
        """Bit totals of all products, shape (len(pairs), r-1)."""
        w = self.weights
        base = w[off].sum()
        col_w = w[off].sum(axis=0)
        out = np.empty((len(self.pairs), len(self.powers)), dtype=np.int64)
        for g, (i, j) in enumerate(self.pairs):
            moved = (off[:, i][None, :] - self.powers[:, None] * off[:, j][None, :]) % self.r
            out[g] = base - col_w[i] + w[moved].sum(axis=1)
        return out


def hd_of(lat: MarkedLattice, u: UnimodularElement, rs: NeighborOffsetSet | None = None) -> HammingDensity:
    if rs is None:
        rs = neighbor_offsets_standard(lat, u.modulus)
    return hamming_density(NeighborOffsetSet(_ShearEvaluator(rs).offsets(u), rs.r))


@dataclass
class DescentResult:
    best_u: UnimodularElement
    best_hd: HammingDensity
    seed_u: UnimodularElement
    seed_hd: HammingDensity
    rng_seed: int | None
    trace: list[tuple[int, int, int, HammingDensity]] = field(default_factory=list)

    def running_best(self) -> list[HammingDensity]:
        out, cur = [], self.seed_hd
        for *_, hd in self.trace:
            cur = hd if hd < cur else cur
            out.append(cur)
        return out


def _walk(lat, r, seed, iters, rng_seed, maximize):
    rs = neighbor_offsets_standard(lat, r)
    ev = _ShearEvaluator(rs)
    k = len(rs)
    u = seed
    off = ev.offsets(u)
    seed_hd = HammingDensity(int(ev.weights[off].sum()), k)
    best_u, best_hd = seed, seed_hd
    trace = []
    for step in range(iters):
        totals = ev.product_totals(off)
        flat = totals.ravel()
        # argmin/argmax return the first occurrence in (generator, power) order
        idx = int(np.argmax(flat) if maximize else np.argmin(flat))
        g, p = divmod(idx, len(ev.powers))
        i, j = ev.pairs[g]
        power = int(ev.powers[p])
        u = u.times_shear(i, j, power)
        off = off.copy()
        off[:, i] = (off[:, i] - power * off[:, j]) % r
        hd = HammingDensity(int(flat[idx]), k)
        trace.append((step, g, power, hd))
        if (hd > best_hd) if maximize else (hd < best_hd):
            best_u, best_hd = u, hd
    return DescentResult(best_u, best_hd, seed, seed_hd, rng_seed, trace)


def hamming_descent(
    lat: MarkedLattice,
    r: int,
    seeds: list[UnimodularElement],
    iters: int = 25,
    rng_seed: int | None = None,
    maximize: bool = False,
) -> list[DescentResult]:
    """Greedy walk on the Cayley graph from each seed.

    Each step moves to the first product ``G_m G_i^k`` (generators in (i, j)
    order, then k = 1..r-1) with the smallest Hamming density, even when that
    is worse than the current element.  The best element seen is kept.
    """
    if not seeds:
        raise ValueError("need at least one seed")
    if iters < 1:
        raise ValueError("iters must be positive")
    return [_walk(lat, r, s, iters, rng_seed, maximize) for s in seeds]


def hamming_ascent(lat, r, seeds, iters=25, rng_seed=None) -> list[DescentResult]:
    """Same walk as :func:`hamming_descent`, chasing the largest density."""
    return hamming_descent(lat, r, seeds, iters, rng_seed, maximize=True)


def random_seed_unimodulars(
    lat: MarkedLattice, r: int, count: int, rng_seed: int, word_length: int = SEED_WORD_LENGTH
) -> list[UnimodularElement]:
    """Random products of generator powers, keeping only those with a new density.

    Stops after ``count`` kept elements or ``100 * count`` attempts, so fewer
    than ``count`` may come back.
    """
    if count < 1:
        raise ValueError("count must be positive")
    n = lat.dimension
    pairs = generator_pairs(n)
    rng = np.random.default_rng(rng_seed)
    rs = neighbor_offsets_standard(lat, r)
    weights = weight_table(r)
    kept, seen_hd = [], set()
    for _ in range(100 * count):
        gens = rng.integers(len(pairs), size=word_length)
        powers = rng.integers(1, r, size=word_length)
        off = rs.offsets.copy()
        for g, k in zip(gens, powers):
            i, j = pairs[g]
            off[:, i] = (off[:, i] - k * off[:, j]) % r
        total = int(weights[off].sum())
        if total in seen_hd:
            continue
        seen_hd.add(total)
        u = UnimodularElement.identity(n, r)
        for g, k in zip(gens, powers):
            u = u.times_shear(*pairs[g], int(k))
        kept.append(u)
        if len(kept) == count:
            break
    return kept


# --------------------------------------------------------------------------
# published matrices

_D4_BEST = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [-1, 0, 1, 0],
    [0, 0, 0, 1],
]

_E8_BEST = [
    [-1, 1, 0, 0, 0, 1, 1, 0],
    [-2, 1, 0, 0, 0, 2, 2, 0],
    [-2, 0, 1, 0, 0, 2, 2, 0],
    [-1, 0, 0, 1, 1, 1, 1, 0],
    [-1, 0, 0, 0, 1, 1, 1, 0],
    [0, 0, 0, 0, 0, 1, 1, 0],
    [0, 0, 0, 0, 0, 0, 1, 0],
    [0, -1, 0, 0, 0, 0, 0, 1],
]

_PRESETS = {
    (LatticeId.D4, 4): _D4_BEST,
    (LatticeId.D4, 8): _D4_BEST,
    (LatticeId.E8, 4): _E8_BEST,
    (LatticeId.E8, 8): _E8_BEST,
}


def preset_best_unimodular(id: LatticeId | str, r: int) -> UnimodularElement:
    """Lowest-density unimodular published for D4 (r = 4, 8) and E8 (r = 4, 8)."""
    key = (LatticeId.parse(id), r)
    if key not in _PRESETS:
        raise ValueError(f"no published unimodular for {key[0].value} with r={r}")
    return UnimodularElement(_PRESETS[key], r)
