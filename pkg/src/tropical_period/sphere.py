"""The integral affine sphere ``B = boundary of {n : <m_rho, n> >= -h(rho)}``.

Only the coarse polyhedral structure is materialized: one facet per ray, and
one cell per cone of the fan (the cell of a cone is the intersection of the
facets of its rays).  Vertices are indexed like ``fan.max_cones``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegenerateFacet, InvalidLoop, NotUnimodular
from .lattice_core import (
    Convexity,
    Fan,
    PLFunction,
    as_int_vector,
    convexity_report,
    det,
    dot,
    dual_basis,
    extends_to_basis,
    integer_kernel,
    lattice_length,
    rank,
    rref,
    solve,
    dual_polytope_vertices,
)


@dataclass(frozen=True)
class Cell:
    rays: frozenset[int]
    vertices: frozenset[int]
    dim: int


@dataclass(frozen=True)
class SphereComplex:
    fan: Fan
    h: PLFunction
    vertex_positions: tuple[tuple[int, ...], ...]
    cells: tuple[Cell, ...]
    facet_of_ray: tuple[int, ...]
    interior_point: tuple[Fraction, ...]

    @property
    def d(self) -> int:
        return self.fan.rank - 1

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_positions)

    def incidence(self, v: int) -> frozenset[int]:
        """The d+1 rays whose facets meet at vertex ``v``."""
        return frozenset(self.fan.max_cones[v])

    def facet(self, rho: int) -> Cell:
        return self.cells[self.facet_of_ray[rho]]

    def cells_of_dim(self, k: int) -> list[Cell]:
        return [c for c in self.cells if c.dim == k]

    def cell_of(self, rays) -> Cell | None:
        """The intersection of the facets of ``rays`` (None when empty)."""
        key = frozenset(rays)
        for c in self.cells:
            if c.rays == key:
                return c
        return None

    def intermediate_cells(self) -> list[Cell]:
        return [c for c in self.cells if 1 <= c.dim <= self.d - 1]

    def face_counts(self) -> list[int]:
        return [len(self.cells_of_dim(k)) for k in range(self.d + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.face_counts()))

    def simplex_orientation(self, vertices: Sequence[int]) -> int:
        """Sign of an ordered d-simplex of vertices lying in one facet.

        Convention: the outward direction comes first, i.e. the sign of
        ``det(v0 - c, v1 - v0, ..., vd - v0)`` with ``c`` an interior point.
        """
        pts = [self.vertex_positions[v] for v in vertices]
        rows = [[a - b for a, b in zip(pts[0], self.interior_point)]]
        rows += [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
        s = det(rows)
        return (s > 0) - (s < 0)


def build_sphere(fan: Fan, h: PLFunction) -> SphereComplex:
    """Construct the coarse cell complex on the boundary of the dual polytope of ``h``."""
    if len(h) != fan.n_rays:
        raise ValueError("PL function length does not match the number of rays")
    if not fan.is_unimodular():
        raise NotUnimodular("the fan is not unimodular")
    conv = convexity_report(h, fan)
    if conv.h is not Convexity.STRICTLY_CONVEX:
        raise DegenerateFacet("h is not strictly convex: " + "; ".join(conv.violations))

    poly = dual_polytope_vertices(h, fan)
    d = fan.rank - 1
    positions = [as_int_vector(solve(fan.cone_matrix(cone), [-h[i] for i in cone]))
                 for cone in fan.max_cones]
    if len(set(positions)) != len(positions):
        raise DegenerateFacet("two maximal cones share a vertex")
    if set(map(tuple, positions)) != set(poly.int_vertices()):
        raise DegenerateFacet("vertex set does not match the dual polytope")

    cells = []
    for cone in fan.all_cones():
        verts = frozenset(k for k, p in enumerate(positions)
                          if all(dot(fan.rays[r], p) == -h[r] for r in cone))
        dim = fan.rank - len(cone)
        pts = [positions[k] for k in sorted(verts)]
        actual = rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]) if len(pts) > 1 else 0
        if not verts or actual != dim:
            raise DegenerateFacet(f"cell of cone {sorted(cone)} has affine dimension {actual}, expected {dim}")
        cells.append(Cell(frozenset(cone), verts, dim))
    facet_of_ray = []
    for r in range(fan.n_rays):
        idx = next(i for i, c in enumerate(cells) if c.rays == frozenset({r}))
        if cells[idx].dim != d:
            raise DegenerateFacet(f"facet of ray {r} is not {d}-dimensional")
        facet_of_ray.append(idx)
    centroid = tuple(sum(Fraction(p[i]) for p in positions) / len(positions) for i in range(fan.rank))
    return SphereComplex(fan, h, tuple(positions), tuple(cells), tuple(facet_of_ray), centroid)


# ---------------------------------------------------------------------------
# frames

@dataclass(frozen=True)
class VertexFrame:
    vertex: int
    covectors: tuple[tuple[int, ...], ...]  # indexed by ray; zero for non-incident rays
    mu_component: tuple[int, ...]


def vertex_frame(B: SphereComplex, v: int) -> VertexFrame:
    """Solve ``<m_rho_i, n(v, rho)> = -delta`` over the rays incident to ``v``."""
    fan = B.fan
    cone = list(fan.max_cones[v])
    dual = dual_basis(fan.cone_matrix(cone))
    zero = (0,) * fan.rank
    cov = [zero] * fan.n_rays
    for i, r in enumerate(cone):
        e = as_int_vector(dual[i]) if all(x.denominator == 1 for x in dual[i]) else None
        if e is None:
            raise NotUnimodular(f"cone {cone} is not unimodular")
        cov[r] = tuple(-x for x in e)
    mu = tuple(sum(cov[r][k] for r in cone) for k in range(fan.rank))
    return VertexFrame(v, tuple(cov), mu)


def all_frames(B: SphereComplex) -> list[VertexFrame]:
    return [vertex_frame(B, v) for v in range(B.n_vertices)]


def edge_lattice_length(B: SphereComplex, e: Cell) -> int:
    if e.dim != 1 or len(e.vertices) != 2:
        raise ValueError("not a 1-cell")
    a, b = (B.vertex_positions[v] for v in sorted(e.vertices))
    return lattice_length([x - y for x, y in zip(a, b)])


def mu_length(B: SphereComplex, v0: int, v1: int) -> int:
    """Lattice length between the Minkowski components of two vertices."""
    a, b = vertex_frame(B, v0).mu_component, vertex_frame(B, v1).mu_component
    return lattice_length([x - y for x, y in zip(a, b)])


# ---------------------------------------------------------------------------
# monodromy

@dataclass(frozen=True)
class MonodromyLoop:
    v0: int
    v1: int
    rho0: int
    rho1: int

    def reversed(self) -> "MonodromyLoop":
        # same base point, the two facets traversed in the opposite order;
        # swapping the vertices as well flips both factors and gives back T
        return MonodromyLoop(self.v0, self.v1, self.rho1, self.rho0)


def _check_loop(B: SphereComplex, loop: MonodromyLoop) -> None:
    if loop.v0 == loop.v1:
        raise InvalidLoop("loop endpoints coincide")
    for rho in (loop.rho0, loop.rho1):
        verts = B.facet(rho).vertices
        if loop.v0 not in verts or loop.v1 not in verts:
            raise InvalidLoop(f"facet of ray {rho} does not contain both vertices")


def monodromy_transport(B: SphereComplex, loop: MonodromyLoop) -> list[list[int]]:
    """``T(n) = n + <m_rho1 - m_rho0, n> (n_mu(v1) - n_mu(v0))`` as an integer matrix."""
    if loop.rho0 != loop.rho1:
        _check_loop(B, loop)
    elif loop.v0 == loop.v1:
        raise InvalidLoop("loop endpoints coincide")
    m0, m1 = B.fan.rays[loop.rho0], B.fan.rays[loop.rho1]
    phi = [a - b for a, b in zip(m1, m0)]
    w = [a - b for a, b in zip(vertex_frame(B, loop.v1).mu_component,
                               vertex_frame(B, loop.v0).mu_component)]
    n = B.fan.rank
    return [[int(i == j) + w[i] * phi[j] for j in range(n)] for i in range(n)]


def all_loops(B: SphereComplex) -> list[MonodromyLoop]:
    """Every admissible loop: two vertices and two distinct facets containing both."""
    loops = []
    for v0, v1 in itertools.permutations(range(B.n_vertices), 2):
        common = sorted(B.incidence(v0) & B.incidence(v1))
        for r0, r1 in itertools.permutations(common, 2):
            loops.append(MonodromyLoop(v0, v1, r0, r1))
    return loops


def loops_around(B: SphereComplex, cell: Cell) -> list[MonodromyLoop]:
    return [MonodromyLoop(v0, v1, r0, r1)
            for v0, v1 in itertools.permutations(sorted(cell.vertices), 2)
            for r0, r1 in itertools.permutations(sorted(cell.rays), 2)]


@dataclass(frozen=True)
class InvariantLattice:
    cell: Cell
    basis: tuple[tuple[int, ...], ...]
    nontrivial_loops: int

    @property
    def rank(self) -> int:
        return len(self.basis)


def local_monodromy_invariants(B: SphereComplex, cell: Cell) -> InvariantLattice:
    """Saturated sublattice of N fixed by every transport around an intermediate cell."""
    if not 1 <= cell.dim <= B.d - 1:
        raise ValueError("only intermediate cells carry local monodromy")
    rows = []
    nontrivial = 0
    n = B.fan.rank
    for loop in loops_around(B, cell):
        T = monodromy_transport(B, loop)
        D = [[T[i][j] - int(i == j) for j in range(n)] for i in range(n)]
        if any(any(r) for r in D):
            nontrivial += 1
            rows.extend(D)
    if not rows:
        basis = [[int(i == j) for j in range(n)] for i in range(n)]
    else:
        basis = integer_kernel(rows)
    return InvariantLattice(cell, tuple(tuple(b) for b in basis), nontrivial)


def singular_cells(B: SphereComplex) -> list[Cell]:
    """Intermediate cells around which some transport is nontrivial."""
    return [c for c in B.intermediate_cells() if local_monodromy_invariants(B, c).nontrivial_loops]


def tangent_lattice(B: SphereComplex, cell: Cell) -> list[list[int]]:
    """Integer basis of the tangent directions of a cell."""
    return integer_kernel([list(B.fan.rays[r]) for r in sorted(cell.rays)])


# ---------------------------------------------------------------------------
# simplicity

@dataclass(frozen=True)
class CellSimplicity:
    cell: Cell
    dual_standard: bool      # conv{m_rho - m_rho0}
    primal_standard: bool    # conv{n_mu(v) - n_mu(v0)} on the refinement
    refinement: str


def _mu_points(B: SphereComplex, cell: Cell) -> list[tuple[int, ...]]:
    return sorted({vertex_frame(B, v).mu_component for v in cell.vertices})


def _primal_check(B: SphereComplex, cell: Cell, sigma: Fan | None) -> tuple[bool, str]:
    pts = _mu_points(B, cell)
    base = pts[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    face_dim = rank(diffs) if diffs else 0
    if face_dim == 0:
        return True, "point"
    if face_dim == 1:
        # a segment can only be refined at its lattice points: unit steps
        (a, b) = pts[0], pts[-1]
        L = lattice_length([x - y for x, y in zip(b, a)])
        step = [(x - y) // L for x, y in zip(b, a)]
        return extends_to_basis([step]), f"unit segments ({L})"
    if sigma is None:
        ok = len(pts) == face_dim + 1 and extends_to_basis(diffs)
        return ok, "coarse"
    # cones of the refining fan whose generators all lie on the face
    on_face = set()
    for i, r in enumerate(sigma.rays):
        trial = diffs + [[x - y for x, y in zip(r, base)]]
        if rank(trial) == face_dim and _in_hull(r, pts):
            on_face.add(i)
    simplices = set()
    for cone in sigma.all_cones():
        if len(cone) == face_dim + 1 and cone <= on_face:
            simplices.add(cone)
    if not simplices:
        return False, "sigma does not refine the face"
    for s in simplices:
        gens = [sigma.rays[i] for i in sorted(s)]
        d_s = [[x - y for x, y in zip(g, gens[0])] for g in gens[1:]]
        if not extends_to_basis(d_s):
            return False, f"sigma cone {sorted(s)} is not standard on the face"
    return True, f"sigma ({len(simplices)} simplices)"


def _in_hull(p, pts) -> bool:
    # Caratheodory: p is a convex combination of some affinely independent subset
    for k in range(1, len(pts) + 1):
        for sub in itertools.combinations(pts, k):
            A = [list(col) for col in zip(*sub)] + [[1] * k]
            aug = [row + [bi] for row, bi in zip(A, list(p) + [1])]
            R, piv = rref(aug)
            if k in piv or len(piv) != k:
                continue
            sol = [R[i][k] for i in range(k)]
            if all(x >= 0 for x in sol):
                return True
    return False


def simplicity_check(B: SphereComplex, sigma: Fan | None = None) -> list[CellSimplicity]:
    """Standard-simplex test of both local polytopes at every intermediate cell."""
    out = []
    fan = B.fan
    for cell in B.intermediate_cells():
        rays = sorted(cell.rays)
        r0 = rays[0]
        dual_rows = [[a - b for a, b in zip(fan.rays[r], fan.rays[r0])] for r in rays[1:]]
        dual_ok = extends_to_basis(dual_rows)
        primal_ok, how = _primal_check(B, cell, sigma)
        out.append(CellSimplicity(cell, dual_ok, primal_ok, how))
    return out
