"""Exact lattice and polyhedral primitives.

Everything here works over ``int`` and ``fractions.Fraction``; no floating point
enters.  Matrices are plain lists of rows.  The polyhedral routines enumerate
subsets exhaustively, which is fine for the ambient ranks (at most 4) we care
about.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import (
    MalformedFan,
    NonIntegralVertex,
    NotUnimodular,
    OriginNotInterior,
    ZeroVector,
)

Vector = tuple
Matrix = list


# ---------------------------------------------------------------------------
# integer vectors

def gcd_list(values: Iterable[int]) -> int:
    return reduce(math.gcd, (int(v) for v in values), 0)


def primitive_vector(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (sign preserved)."""
    g = gcd_list(v)
    if g == 0:
        raise ZeroVector(f"cannot normalize the zero vector {tuple(v)}")
    return tuple(int(x) // g for x in v)


def lattice_length(v: Sequence[int]) -> int:
    """Lattice length of an integral segment with direction ``v``."""
    return gcd_list(v)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def is_integral(v: Iterable) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def as_int_vector(v: Iterable) -> tuple[int, ...]:
    out = []
    for x in v:
        x = Fraction(x)
        if x.denominator != 1:
            raise ValueError(f"{x} is not an integer")
        out.append(int(x))
    return tuple(out)


# ---------------------------------------------------------------------------
# exact rational matrices

def to_fraction_matrix(A: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in A]


def identity(n: int, one=1) -> Matrix:
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*A)]


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def mat_pow(A, k: int):
    n = len(A)
    out = identity(n, Fraction(1))
    for _ in range(k):
        out = mat_mul(out, A)
    return out


def is_zero_matrix(A) -> bool:
    return all(x == 0 for row in A for x in row)


def rref(A: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over the rationals, with pivot columns."""
    M = to_fraction_matrix(A)
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        piv = M[r][c]
        M[r] = [x / piv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def det(A: Sequence[Sequence]) -> Fraction:
    M = to_fraction_matrix(A)
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if M[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            M[c], M[pr] = M[pr], M[c]
            sign = -sign
        piv = M[c][c]
        result *= piv
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] / piv
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return sign * result


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique solution of a square nonsingular system ``A x = b``."""
    n = len(A)
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular system")
    return [R[i][n] for i in range(n)]


def inverse(A: Sequence[Sequence]) -> Matrix:
    n = len(A)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def nullspace(A: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Rational basis of ``{x : A x = 0}``."""
    if not A:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    n = len(A[0])
    R, pivots = rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i][f]
        basis.append(x)
    return basis


def independent_rows(rows: Sequence[Sequence]) -> list[int]:
    """Indices of a greedy maximal independent subset of ``rows`` (first-come)."""
    chosen: list[int] = []
    current: list = []
    r = 0
    for i, row in enumerate(rows):
        trial = current + [list(row)]
        rk = rank(trial)
        if rk > r:
            chosen.append(i)
            current = trial
            r = rk
    return chosen


# ---------------------------------------------------------------------------
# integer lattices

def _clear_denominators(row: Sequence) -> list[int]:
    fr = [Fraction(x) for x in row]
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in fr), 1)
    return [int(x * den) for x in fr]


def row_hnf(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Hermite normal form (nonzero rows) of the integer row span of ``rows``."""
    M = [list(map(int, r)) for r in rows if any(r)]
    if not M:
        return []
    ncols = len(M[0])
    out: list[list[int]] = []
    for c in range(ncols):
        # Euclid on column c among the remaining rows
        while True:
            nz = [i for i, r in enumerate(M) if r[c] != 0]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda i: abs(M[i][c]))
            for i in nz:
                if i != p:
                    q = M[i][c] // M[p][c]
                    M[i] = [a - q * b for a, b in zip(M[i], M[p])]
        nz = [i for i, r in enumerate(M) if r[c] != 0]
        if nz:
            piv = M.pop(nz[0])
            if piv[c] < 0:
                piv = [-x for x in piv]
            out.append(piv)
        M = [r for r in M if any(r)]
    # reduce entries above pivots
    for i, row in enumerate(out):
        c = next(j for j, x in enumerate(row) if x != 0)
        for k in range(i):
            q = out[k][c] // row[c]
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], row)]
    return out


def integer_kernel(A: Sequence[Sequence]) -> list[list[int]]:
    """Integer basis of the (automatically saturated) lattice ``{x in Z^n : A x = 0}``."""
    if not A:
        raise ValueError("need at least one row to know the ambient rank")
    n = len(A[0])
    Ai = [_clear_denominators(r) for r in A]
    m = len(Ai)
    # rows (column_j of A | e_j); unimodular row ops on this keep the right block unimodular
    W = [[Ai[i][j] for i in range(m)] + [int(j == k) for k in range(n)] for j in range(n)]
    for c in range(m):
        while True:
            nz = [i for i, r in enumerate(W) if r[c] != 0]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda i: abs(W[i][c]))
            for i in nz:
                if i != p:
                    q = W[i][c] // W[p][c]
                    W[i] = [a - q * b for a, b in zip(W[i], W[p])]
        nz = [i for i, r in enumerate(W) if r[c] != 0]
        if nz:
            W.pop(nz[0])
    basis = [r[m:] for r in W]
    return row_hnf(basis) if basis else []


def minors_gcd(rows: Sequence[Sequence[int]]) -> int:
    """gcd of the maximal minors of a k x n integer matrix (0 if rank < k)."""
    k = len(rows)
    if k == 0:
        return 1
    n = len(rows[0])
    g = 0
    for cols in itertools.combinations(range(n), k):
        sub = [[r[c] for c in cols] for r in rows]
        g = math.gcd(g, int(det(sub)))
    return g


def extends_to_basis(rows: Sequence[Sequence[int]]) -> bool:
    """True iff the integer vectors are part of a basis of the ambient lattice."""
    if not rows:
        return True
    if not all(is_integral(r) for r in rows):
        return False
    return minors_gcd([as_int_vector(r) for r in rows]) == 1


def lattice_index(sub: Sequence[Sequence[int]], full: Sequence[Sequence[int]]) -> int:
    """Index of the row lattice of ``sub`` inside that of ``full`` (same rank assumed)."""
    hs, hf = row_hnf(sub), row_hnf(full)
    if len(hs) != len(hf):
        raise ValueError("lattices of different ranks")
    return minors_gcd(hs) // minors_gcd(hf)


def dual_basis(rows: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Rows ``e_i`` with ``<rows[j], e_i> = delta_ij`` for a square nonsingular matrix."""
    inv = inverse(rows)  # rows @ inv = I, so the columns of inv are the dual vectors
    return transpose(inv)


# ---------------------------------------------------------------------------
# fans and PL functions

class Convexity(enum.Enum):
    NOT_CONVEX = "NotConvex"
    CONVEX = "Convex"
    STRICTLY_CONVEX = "StrictlyConvex"


@dataclass(frozen=True)
class Fan:
    """A simplicial fan given by primitive rays and maximal cones (0-based indices)."""

    rank: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", tuple(sorted(set(cones))))
        for r in rays:
            if len(r) != self.rank:
                raise MalformedFan(f"ray {r} does not have length {self.rank}")
            if gcd_list(r) != 1:
                raise MalformedFan(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise MalformedFan("duplicate rays")
        for c in cones:
            if any(i < 0 or i >= len(rays) for i in c):
                raise MalformedFan(f"cone {c} refers to a ray out of range")
            if len(set(c)) != self.rank:
                raise MalformedFan(f"cone {c} is not simplicial of full dimension")
            if det([rays[i] for i in c]) == 0:
                raise MalformedFan(f"cone {c} has linearly dependent generators")

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @property
    def dim(self) -> int:
        """The dimension d of the hypersurface (rank - 1)."""
        return self.rank - 1

    def cone_matrix(self, cone: Iterable[int]) -> list[tuple[int, ...]]:
        return [self.rays[i] for i in cone]

    def is_cone(self, rays: Iterable[int]) -> bool:
        s = set(rays)
        return any(s <= set(c) for c in self.max_cones)

    def cones_containing(self, rays: Iterable[int]) -> list[tuple[int, ...]]:
        s = set(rays)
        return [c for c in self.max_cones if s <= set(c)]

    def all_cones(self) -> list[frozenset[int]]:
        """Every nonempty cone of the fan, as a set of ray indices."""
        out: set[frozenset[int]] = set()
        for c in self.max_cones:
            for k in range(1, len(c) + 1):
                out.update(frozenset(s) for s in itertools.combinations(c, k))
        return sorted(out, key=lambda s: (len(s), sorted(s)))

    def is_unimodular(self) -> bool:
        return all(abs(det(self.cone_matrix(c))) == 1 for c in self.max_cones)

    def complementary_coords(self, rho: int, support: Iterable[int],
                             cone: Sequence[int] | None = None) -> list[int]:
        """An ``n`` in N with ``<m_rho, n> = 1`` and ``<m_r, n> = 0`` for the other support rays.

        Uses the dual basis of a maximal cone containing the support; raises
        NotUnimodular if that cone is not a lattice basis.
        """
        support = set(support) | {rho}
        if cone is None:
            cones = self.cones_containing(support)
            if not cones:
                raise ValueError(f"rays {sorted(support)} do not span a cone")
            cone = cones[0]
        cone = list(cone)
        dual = dual_basis(self.cone_matrix(cone))
        e = dual[cone.index(rho)]
        if not is_integral(e):
            raise NotUnimodular(f"cone {tuple(cone)} is not unimodular")
        return list(as_int_vector(e))


@dataclass(frozen=True)
class PLFunction:
    """Integer values of a piecewise linear function on the rays of a fan."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def __add__(self, other: "PLFunction") -> "PLFunction":
        return PLFunction(tuple(a + b for a, b in zip(self.values, other.values)))

    def shifted(self, c: int) -> "PLFunction":
        return PLFunction(tuple(v + c for v in self.values))


@dataclass(frozen=True)
class LatticePolytope:
    """A polytope with vertices and inequalities ``<a, x> >= -b`` stored as ``(a, b)``."""

    vertices: tuple[tuple[Fraction, ...], ...]
    hrep: tuple[tuple[tuple[Fraction, ...], Fraction], ...] = field(default=())

    @property
    def dim_ambient(self) -> int:
        return len(self.vertices[0])

    def is_integral(self) -> bool:
        return all(is_integral(v) for v in self.vertices)

    def int_vertices(self) -> list[tuple[int, ...]]:
        return [as_int_vector(v) for v in self.vertices]

    def contains(self, x: Sequence) -> bool:
        return all(dot(a, x) >= -b for a, b in self.hrep)

    def same_set(self, other: "LatticePolytope") -> bool:
        return set(self.vertices) == set(other.vertices)


def _vkey(v):
    return tuple(Fraction(x) for x in v)


def enumerate_vertices(hrep: Sequence[tuple[Sequence, object]], dim: int) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{x : <a, x> >= -b}`` by solving every ``dim``-subset of constraints."""
    found: set[tuple[Fraction, ...]] = set()
    normals = [[Fraction(x) for x in a] for a, _ in hrep]
    offsets = [Fraction(b) for _, b in hrep]
    for idx in itertools.combinations(range(len(hrep)), dim):
        A = [normals[i] for i in idx]
        if det(A) == 0:
            continue
        x = solve(A, [-offsets[i] for i in idx])
        if all(dot(a, x) >= -b for a, b in zip(normals, offsets)):
            found.add(tuple(x))
    return sorted(found)


def convex_hull_hrep(points: Sequence[Sequence]) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """Facet inequalities ``<a, x> >= -b`` of a full-dimensional point configuration."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    n = len(pts[0])
    if rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]) < n:
        raise ValueError("point configuration is not full-dimensional")
    facets: set[tuple[tuple[Fraction, ...], Fraction]] = set()
    for idx in itertools.combinations(range(len(pts)), n):
        base = pts[idx[0]]
        diffs = [[a - b for a, b in zip(pts[i], base)] for i in idx[1:]]
        ker = nullspace(diffs, ncols=n) if diffs else nullspace([], ncols=n)
        if len(ker) != 1:
            continue
        a = ker[0]
        vals = [dot(a, p) for p in pts]
        c = dot(a, base)
        if all(v >= c for v in vals):
            pass
        elif all(v <= c for v in vals):
            a = [-x for x in a]
            c = -c
        else:
            continue
        # normalize to a primitive integer normal
        ai = _clear_denominators(a)
        g = gcd_list(ai)
        ai = [x // g for x in ai]
        scale = Fraction(ai[next(i for i, x in enumerate(ai) if x)]) / a[next(i for i, x in enumerate(ai) if x)]
        facets.add((tuple(Fraction(x) for x in ai), -c * scale))
    return sorted(facets)


def hull_vertices(points: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Vertices of the convex hull of a full-dimensional point configuration."""
    hrep = convex_hull_hrep(points)
    n = len(points[0])
    out = []
    for p in {tuple(Fraction(x) for x in q) for q in points}:
        active = [a for a, b in hrep if dot(a, p) == -b]
        if rank(active) == n:
            out.append(p)
    return sorted(out)


def lattice_points(poly: LatticePolytope) -> list[tuple[int, ...]]:
    """All integer points of a polytope (bounding-box enumeration)."""
    n = poly.dim_ambient
    lo = [math.floor(min(v[i] for v in poly.vertices)) for i in range(n)]
    hi = [math.ceil(max(v[i] for v in poly.vertices)) for i in range(n)]
    return [p for p in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
            if poly.contains(p)]


def polytope_from_points(points: Sequence[Sequence]) -> LatticePolytope:
    return LatticePolytope(tuple(hull_vertices(points)), tuple(convex_hull_hrep(points)))


def polar_dual(p: LatticePolytope) -> LatticePolytope:
    """``{n : <m, n> >= -1 for all vertices m of p}`` with vertices enumerated."""
    hrep = p.hrep or tuple(convex_hull_hrep(p.vertices))
    if any(b <= 0 for _, b in hrep):
        raise OriginNotInterior("0 is not an interior point of the polytope")
    dual_hrep = tuple((tuple(Fraction(x) for x in m), Fraction(1)) for m in p.vertices)
    verts = enumerate_vertices(dual_hrep, p.dim_ambient)
    return LatticePolytope(tuple(verts), dual_hrep)


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class ValidationReport:
    unimodular: bool
    complete: bool
    reflexive: bool
    fan_polytope: LatticePolytope | None
    rays_on_boundary: bool
    cone_determinants: tuple[int, ...]
    diagnostics: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.unimodular and self.complete and self.reflexive and self.rays_on_boundary


def _is_complete(fan: Fan) -> tuple[bool, list[str]]:
    diags = []
    walls: dict[frozenset[int], list[int]] = {}
    for k, c in enumerate(fan.max_cones):
        for w in itertools.combinations(c, fan.rank - 1):
            walls.setdefault(frozenset(w), []).append(k)
    ok = True
    for w, owners in walls.items():
        if len(owners) != 2:
            ok = False
            diags.append(f"wall {sorted(w)} is shared by {len(owners)} maximal cone(s)")
    # connectivity of the dual graph
    adj = {k: set() for k in range(len(fan.max_cones))}
    for owners in walls.values():
        if len(owners) == 2:
            a, b = owners
            adj[a].add(b)
            adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if fan.max_cones and len(seen) != len(fan.max_cones):
        ok = False
        diags.append("dual graph of maximal cones is disconnected")
    # opposite sides across every wall: a complete fan has no overlapping neighbours
    for w, owners in walls.items():
        if len(owners) != 2:
            continue
        wl = sorted(w)
        sides = []
        for k in owners:
            (extra,) = set(fan.max_cones[k]) - w
            sides.append(det([fan.rays[i] for i in wl] + [fan.rays[extra]]))
        if sides[0] * sides[1] >= 0:
            ok = False
            diags.append(f"cones across wall {wl} lie on the same side")
    return ok, diags


def validate_input(fan: Fan) -> ValidationReport:
    """Unimodularity, completeness and reflexivity of the fan polytope."""
    diags: list[str] = []
    dets = tuple(int(det(fan.cone_matrix(c))) for c in fan.max_cones)
    unimodular = all(abs(x) == 1 for x in dets)
    for c, dv in zip(fan.max_cones, dets):
        if abs(dv) != 1:
            diags.append(f"cone {list(c)} has determinant {dv}")
    complete, cdiags = _is_complete(fan)
    diags.extend(cdiags)

    poly = None
    reflexive = False
    on_boundary = False
    try:
        poly = polytope_from_points(fan.rays)
        dual = polar_dual(poly)
        reflexive = dual.is_integral()
        if not reflexive:
            diags.append("polar dual of the fan polytope has non-integral vertices")
        # every generator must sit on the boundary at lattice distance one
        on_boundary = all(any(dot(a, r) == -b for a, b in poly.hrep) for r in fan.rays) and \
            all(b == 1 for _, b in poly.hrep)
        if not on_boundary:
            diags.append("some ray generator is not a boundary point at height one")
    except (ValueError, OriginNotInterior) as exc:
        diags.append(f"fan polytope: {exc}")
    return ValidationReport(unimodular, complete, reflexive, poly, on_boundary, dets, tuple(diags))


# ---------------------------------------------------------------------------
# PL functions

def linear_piece(h: PLFunction, fan: Fan, cone: Sequence[int]) -> list[Fraction]:
    """The covector ``l`` with ``<m_rho, l> = h(rho)`` on the generators of ``cone``."""
    return solve(fan.cone_matrix(cone), [h[i] for i in cone])


@dataclass(frozen=True)
class WallViolation:
    cone: tuple[int, ...]
    ray: int
    linear_value: Fraction
    h_value: int

    def describe(self, name: str = "h") -> str:
        return (f"{name}: linear piece of cone {list(self.cone)} gives {self.linear_value} at ray "
                f"{self.ray}, exceeding {name}={self.h_value}")


def _classify(values: Sequence[int], fan: Fan) -> tuple[Convexity, list[WallViolation], list[WallViolation]]:
    h = PLFunction(tuple(values))
    violations, equalities = [], []
    for cone in fan.max_cones:
        ell = linear_piece(h, fan, cone)
        for r in range(fan.n_rays):
            if r in cone:
                continue
            val = dot(ell, fan.rays[r])
            if val > h[r]:
                violations.append(WallViolation(cone, r, val, h[r]))
            elif val == h[r]:
                equalities.append(WallViolation(cone, r, val, h[r]))
    if violations:
        return Convexity.NOT_CONVEX, violations, equalities
    if equalities:
        return Convexity.CONVEX, violations, equalities
    return Convexity.STRICTLY_CONVEX, violations, equalities


def convexity_classify(h: PLFunction, fan: Fan) -> Convexity:
    """Classify ``h`` with the convention ``l_sigma(m_rho) <= h(m_rho)``."""
    return _classify(h.values, fan)[0]


@dataclass(frozen=True)
class ConvexityReport:
    h: Convexity
    h_prime: Convexity
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.h is Convexity.STRICTLY_CONVEX and self.h_prime is not Convexity.NOT_CONVEX


def convexity_report(h: PLFunction, fan: Fan) -> ConvexityReport:
    """Classify both ``h`` and ``h' = h - 1`` (the anticanonical function is 1 on rays)."""
    ch, vh, eq = _classify(h.values, fan)
    chp, vhp, _ = _classify(h.shifted(-1).values, fan)
    msgs = [v.describe("h") for v in vh]
    if ch is Convexity.CONVEX:
        msgs += [f"h: wall inequality is an equality at cone {list(e.cone)}, ray {e.ray}" for e in eq]
    msgs += [v.describe("h'") for v in vhp]
    return ConvexityReport(ch, chp, tuple(msgs))


def pl_extension(h: PLFunction, fan: Fan, m: Sequence[int]) -> Fraction:
    """Value at ``m`` of the PL extension of a convex ``h`` (max of the linear pieces)."""
    return max(dot(linear_piece(h, fan, c), m) for c in fan.max_cones)


def dual_polytope_vertices(h: PLFunction, fan: Fan) -> LatticePolytope:
    """``{n : <m_rho, n> >= -h(rho)}``; one vertex per maximal cone for strictly convex ``h``."""
    hrep = tuple((tuple(Fraction(x) for x in r), Fraction(hv)) for r, hv in zip(fan.rays, h.values))
    verts = set()
    for cone in fan.max_cones:
        x = solve(fan.cone_matrix(cone), [-h[i] for i in cone])
        if not is_integral(x):
            raise NonIntegralVertex(f"vertex {x} of cone {cone} is not integral")
        verts.add(tuple(x))
    enumerated = set(enumerate_vertices(hrep, fan.rank))
    if enumerated != verts:
        raise NonIntegralVertex("vertex set differs from the per-cone solutions; h is not strictly convex")
    return LatticePolytope(tuple(sorted(verts)), hrep)
