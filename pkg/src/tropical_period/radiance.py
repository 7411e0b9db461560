"""Tropical side of the comparison: vertex identity, intersection numbers on B, c_B."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import UnexpectedCellDim
from .lattice_core import PLFunction, dot, dual_basis, lattice_length
from .sphere import SphereComplex, vertex_frame
from .toric_cohomology import CohClass, ToricModel, reduction_covector


@dataclass(frozen=True)
class VertexCheck:
    vertex: int
    position: tuple[int, ...]
    reconstructed: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.position == self.reconstructed


def vertex_identity_check(B: SphereComplex, h: PLFunction) -> list[VertexCheck]:
    """Compare each vertex of B with ``sum_rho h(rho) n(v, rho)``."""
    out = []
    for v in range(B.n_vertices):
        fr = vertex_frame(B, v)
        rec = [0] * B.fan.rank
        for r in B.incidence(v):
            rec = [a + h[r] * b for a, b in zip(rec, fr.covectors[r])]
        out.append(VertexCheck(v, tuple(B.vertex_positions[v]), tuple(rec)))
    return out


@dataclass(frozen=True)
class EdgeValue:
    """Both evaluations of a distinct-support intersection on the 1-cell they cut out."""

    edge_vertices: tuple[int, int]
    mu_length: int
    frame_value: int


def edge_value(B: SphereComplex, support: Sequence[int]) -> EdgeValue | None:
    """Value for d distinct rays; None when their facets do not meet."""
    support = sorted(support)
    cell = B.cell_of(support)
    if cell is None:
        return None
    if cell.dim != 1 or len(cell.vertices) != 2:
        raise UnexpectedCellDim(f"facets of {support} meet in a {cell.dim}-cell")
    v0, v1 = sorted(cell.vertices)
    fan = B.fan
    rho0 = next(iter(B.incidence(v0) - set(support)))
    rho1 = next(iter(B.incidence(v1) - set(support)))
    a = vertex_frame(B, v0).mu_component
    b = vertex_frame(B, v1).mu_component
    mu = lattice_length([x - y for x, y in zip(b, a)])
    # e'_i dual to (m_rho1, support); s_i = <m_rho0, e'_i>
    dual = dual_basis([fan.rays[rho1]] + [fan.rays[r] for r in support])
    s = [dot(fan.rays[rho0], e) for e in dual[1:]]
    return EdgeValue((v0, v1), mu, int(2 - sum(s)))


def tropical_intersection_number(B: SphereComplex, m: Sequence[int],
                                 rng: random.Random | None = None) -> int:
    """Product of the facet classes of the rays in ``m`` (size d) evaluated on B."""
    m = sorted(m)
    if len(m) != B.d:
        raise ValueError(f"need {B.d} rays")
    support = sorted(set(m))
    if not B.fan.is_cone(support):
        return 0
    if len(support) == len(m):
        ev = edge_value(B, support)
        if ev is None:
            return 0
        if abs(ev.frame_value) != ev.mu_length:
            raise ArithmeticError(f"edge values disagree on {support}: {ev}")
        return ev.frame_value
    repeated = [r for r in support if m.count(r) > 1]
    rho = rng.choice(repeated) if rng is not None else repeated[0]
    n = reduction_covector(B.fan, rho, support, rng)
    rest = list(m)
    rest.remove(rho)
    total = 0
    for r in range(B.fan.n_rays):
        if r in support:
            continue
        c = dot(B.fan.rays[r], n)
        if c:
            total -= c * tropical_intersection_number(B, rest + [r], rng)
    return total


@dataclass(frozen=True)
class IntersectionRow:
    multiset: tuple[int, ...]
    tropical: int
    toric: int

    @property
    def ok(self) -> bool:
        return self.tropical == self.toric


def intersection_table(B: SphereComplex, model: ToricModel) -> list[IntersectionRow]:
    """Tropical against toric values for every d-multiset of rays."""
    rows = []
    for m in itertools.combinations_with_replacement(range(B.fan.n_rays), B.d):
        rows.append(IntersectionRow(m, tropical_intersection_number(B, m),
                                    model.intersection_number(m, with_Y=True)))
    return rows


@dataclass(frozen=True)
class RadianceClass:
    coefficients: tuple[int, ...]
    cls: CohClass


def radiance_class(model: ToricModel, h: PLFunction | Sequence[int]) -> RadianceClass:
    coeffs = tuple(h.values if isinstance(h, PLFunction) else h)
    return RadianceClass(coeffs, model.divisor_class(coeffs))


def top_power(model: ToricModel, c: RadianceClass) -> Fraction:
    x = model.unit()
    for _ in range(model.d):
        x = model.cup_divisor(x, c.coefficients)
    return model.integral(x)


def top_power_positivity(model: ToricModel, c: RadianceClass) -> tuple[int, bool]:
    value = top_power(model, c)
    assert value.denominator == 1
    return int(value), value > 0
