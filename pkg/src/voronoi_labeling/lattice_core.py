"""Root lattices A2, D4 and E8 with their standard bases and shift vectors.

Lattice points are kept in ambient coordinates (``basis @ z`` for integer
``z``).  All array operations accept a single vector of shape ``(n,)`` or a
batch of shape ``(m, n)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TOL = 1e-9


class LatticeId(str, enum.Enum):
    A2 = "A2"
    D4 = "D4"
    E8 = "E8"

    @property
    def dimension(self) -> int:
        return {"A2": 2, "D4": 4, "E8": 8}[self.value]

    @property
    def kissing_number(self) -> int:
        return {"A2": 6, "D4": 24, "E8": 240}[self.value]

    @classmethod
    def parse(cls, name: str | LatticeId) -> LatticeId:
        if isinstance(name, LatticeId):
            return name
        try:
            return cls(name.upper())
        except ValueError:
            raise ValueError(f"unknown lattice {name!r}; expected one of a2, d4, e8") from None


@dataclass(frozen=True, eq=False)
class MarkedLattice:
    """A lattice together with a basis (columns) and a shift vector."""

    id: LatticeId
    basis: np.ndarray
    shift: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        shift = np.array(self.shift, dtype=float)
        n = self.id.dimension
        if basis.shape != (n, n) or shift.shape != (n,):
            raise ValueError(f"{self.id.value} needs a {n}x{n} basis and a length-{n} shift")
        if abs(np.linalg.det(basis)) <= TOL:
            raise ValueError("basis is singular")
        basis.flags.writeable = False
        shift.flags.writeable = False
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "shift", shift)

    @property
    def dimension(self) -> int:
        return self.id.dimension

    @cached_property
    def basis_inv(self) -> np.ndarray:
        inv = np.linalg.inv(self.basis)
        inv.flags.writeable = False
        return inv

    def with_basis(self, basis) -> MarkedLattice:
        """Same lattice and shift, relabelled by a different basis."""
        return MarkedLattice(self.id, basis, self.shift)


def standard_lattice(id: LatticeId | str) -> MarkedLattice:
    """Standard basis and shift vector of a root lattice."""
    id = LatticeId.parse(id)
    if id is LatticeId.A2:
        s3 = np.sqrt(3.0)
        basis = np.array([[1.0, -0.5], [0.0, s3 / 2]])
        shift = np.array([1 / 8, s3 / 8])
    elif id is LatticeId.D4:
        basis = np.array(
            [[1, 1, 0, 0], [1, -1, 1, 0], [0, 0, -1, 1], [0, 0, 0, -1]], dtype=float
        )
        shift = np.array([17, 6, 0, -11], dtype=float) / 32
    else:
        basis = np.zeros((8, 8))
        basis[0, 0] = 2.0
        for j in range(1, 7):
            basis[j - 1, j] = -1.0
            basis[j, j] = 1.0
        basis[:, 7] = 0.5
        shift = np.array([0.645, 0.0484, 0.116, 0.214, 0.182, 0.247, 0.317, 0.083])
    return MarkedLattice(id, basis, shift)


# --------------------------------------------------------------------------
# minimal vectors


def _short_vectors(basis: np.ndarray, radius_sq: float) -> list[np.ndarray]:
    """Integer coefficient vectors z != 0 with |basis @ z|^2 <= radius_sq.

    Fincke-Pohst enumeration on the Cholesky factor of the Gram matrix.
    """
    n = basis.shape[1]
    R = np.linalg.cholesky(basis.T @ basis).T  # upper triangular
    diag = np.diag(R)
    mu = R / diag[:, None]
    bound = radius_sq + TOL
    found = []
    z = np.zeros(n, dtype=np.int64)

    def recurse(i: int, partial: float):
        centre = -float(mu[i, i + 1 :] @ z[i + 1 :])
        slack = bound - partial
        if slack < 0:
            return
        half = np.sqrt(slack) / diag[i]
        for zi in range(int(np.ceil(centre - half)), int(np.floor(centre + half)) + 1):
            z[i] = zi
            term = partial + (diag[i] * (zi - centre)) ** 2
            if term > bound:
                continue
            if i == 0:
                if np.any(z):
                    found.append(z.copy())
            else:
                recurse(i - 1, term)
        z[i] = 0

    recurse(n - 1, 0.0)
    return found


def minimal_vectors(lat: MarkedLattice) -> np.ndarray:
    """All nonzero lattice vectors of minimal norm, sorted lexicographically.

    Returns an array of shape ``(kissing_number, n)`` in ambient coordinates.
    """
    key = "minimal_vectors"
    if key in lat._cache:
        return lat._cache[key]
    # the shortest basis column bounds the minimum from above
    radius_sq = float(np.min(np.sum(lat.basis**2, axis=0)))
    coeffs = _short_vectors(lat.basis, radius_sq)
    if not coeffs:
        raise RuntimeError("short-vector enumeration produced no vectors")
    pts = np.array(coeffs, dtype=float) @ lat.basis.T
    norms = np.sum(pts**2, axis=1)
    pts = pts[np.abs(norms - norms.min()) <= TOL]
    pts = _lexsort_rows(pts + 0.0)
    pts.flags.writeable = False
    lat._cache[key] = pts
    return pts


def _lexsort_rows(pts: np.ndarray) -> np.ndarray:
    # sort on rounded keys so float noise cannot reorder equal coordinates
    keys = np.round(pts, 9)
    order = np.lexsort(keys.T[::-1])
    return pts[order]


# --------------------------------------------------------------------------
# nearest-point quantizers


def _round_dn(y: np.ndarray) -> np.ndarray:
    """Closest point of D_n (integer vectors with even sum), batched."""
    f = np.round(y)
    odd = (np.sum(f, axis=-1) % 2) != 0
    if np.any(odd):
        yo, fo = y[odd], f[odd]
        err = yo - fo
        k = np.argmax(np.abs(err), axis=-1)
        rows = np.arange(len(k))
        step = np.where(err[rows, k] >= 0, 1.0, -1.0)
        fo[rows, k] += step
        f[odd] = fo
    return f


def _quantize_a2(lat: MarkedLattice, y: np.ndarray) -> np.ndarray:
    z0 = np.round(y @ lat.basis_inv.T)
    best = None
    best_d = None
    for dz in ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)):
        cand = (z0 + np.array(dz, dtype=float)) @ lat.basis.T
        d = np.sum((y - cand) ** 2, axis=-1)
        if best is None:
            best, best_d = cand, d
        else:
            better = d < best_d
            best = np.where(better[:, None], cand, best)
            best_d = np.where(better, d, best_d)
    return best


def _quantize_e8(y: np.ndarray) -> np.ndarray:
    a = _round_dn(y)
    b = _round_dn(y - 0.5) + 0.5
    da = np.sum((y - a) ** 2, axis=-1)
    db = np.sum((y - b) ** 2, axis=-1)
    return np.where((db < da)[:, None], b, a)


def _fast_quantize(lat: MarkedLattice, y: np.ndarray) -> np.ndarray:
    if lat.id is LatticeId.A2:
        return _quantize_a2(lat, y)
    if lat.id is LatticeId.D4:
        return _round_dn(y)
    return _quantize_e8(y)


def _resolve_tie(y: np.ndarray, q: np.ndarray, relevant: np.ndarray) -> np.ndarray:
    """Lexicographically smallest among all lattice points nearest to y.

    Walks the facet-adjacency graph of equidistant points starting at q.
    """
    d0 = np.sum((y - q) ** 2)
    tied = {tuple(np.round(q, 9)): q}
    frontier = q[None, :]
    while len(frontier):
        cands = (frontier[:, None, :] + relevant[None, :, :]).reshape(-1, len(q))
        d = np.sum((y - cands) ** 2, axis=1)
        cands = cands[np.abs(d - d0) <= TOL]
        fresh = {}
        for key, c in zip(map(tuple, np.round(cands, 9)), cands):
            if key not in tied and key not in fresh:
                fresh[key] = c
        tied.update(fresh)
        frontier = np.array(list(fresh.values())).reshape(-1, len(q))
    return tied[min(tied)]


def quantize_nearest(lat: MarkedLattice, y, resolve_ties: bool = True) -> np.ndarray:
    """Nearest lattice point to ``y`` (exact per-lattice rules).

    Points equidistant from several lattice points resolve to the
    lexicographically smallest candidate.  ``resolve_ties=False`` skips that
    step and returns an arbitrary nearest point, which is enough whenever only
    the distance matters.
    """
    y = np.asarray(y, dtype=float)
    n = lat.dimension
    if y.shape[-1:] != (n,) or y.ndim > 2:
        raise ValueError(f"expected vectors of dimension {n}, got shape {y.shape}")
    single = y.ndim == 1
    ys = np.atleast_2d(y)
    q = _fast_quantize(lat, ys)
    if not resolve_ties:
        return q[0] if single else q

    # y lies on the facet between q and q+v iff 2<y-q, v> == |v|^2
    relevant = minimal_vectors(lat)
    norm = float(np.sum(relevant[0] ** 2))
    margin = 2.0 * (ys - q) @ relevant.T
    on_facet = np.any(np.abs(margin - norm) <= TOL, axis=1)
    for i in np.flatnonzero(on_facet):
        q[i] = _resolve_tie(ys[i], q[i], relevant)
    q = q + 0.0  # normalise -0.0
    return q[0] if single else q


def voronoi_reduce(lat: MarkedLattice, p, r: int) -> np.ndarray:
    """Representative of ``p`` modulo ``r``-scaled lattice inside the scaled Voronoi cell."""
    if r < 2:
        raise ValueError("r must be at least 2")
    p = np.asarray(p, dtype=float)
    return p - r * quantize_nearest(lat, p / r)


def label_of_point(lat: MarkedLattice, c, r: int) -> np.ndarray:
    """Integer label ``basis^-1 c`` of a lattice point, reduced mod r."""
    c = np.asarray(c, dtype=float)
    if c.shape[-1:] != (lat.dimension,):
        raise ValueError(f"expected vectors of dimension {lat.dimension}")
    z = c @ lat.basis_inv.T
    zi = np.round(z)
    resid = np.max(np.abs(z - zi)) if z.size else 0.0
    if resid > TOL:
        raise ValueError(f"not a lattice point (residual {resid:.3g})")
    return np.mod(zi.astype(np.int64), r)
