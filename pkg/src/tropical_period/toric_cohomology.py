"""Ambient cohomology of an anticanonical hypersurface in a smooth complete toric variety.

Classes are stored through their numerical coordinates: pairings, through
``Y``, against square-free monomials of complementary degree.  Because the
pairing on the ambient part is nondegenerate this is a faithful
representation, and no polynomial ideal arithmetic is needed.
"""

from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegreeOverflow, NotUnimodular
from .lattice_core import Fan, dot, independent_rows, inverse, mat_mul

Multiset = tuple[int, ...]


def _key(m: Iterable[int]) -> Multiset:
    return tuple(sorted(m))


def reduction_covector(fan: Fan, rho: int, support: Iterable[int],
                       rng: random.Random | None = None) -> list[int]:
    """``n`` with ``<m_rho, n> = 1`` and ``<m_r, n> = 0`` on the rest of ``support``.

    With ``rng`` the choice is randomized: a random maximal cone containing the
    support, plus a random integer combination of the dual vectors of that
    cone's other rays (which vanish on the whole support).
    """
    support = set(support) | {rho}
    cones = fan.cones_containing(support)
    if not cones:
        raise ValueError(f"rays {sorted(support)} do not span a cone")
    cone = rng.choice(cones) if rng is not None else cones[0]
    n = fan.complementary_coords(rho, support, cone)
    if rng is not None:
        for r in cone:
            if r not in support:
                c = rng.randint(-3, 3)
                if c:
                    e = fan.complementary_coords(r, [r], cone)
                    n = [a + c * b for a, b in zip(n, e)]
    return n


@dataclass(frozen=True)
class CohClass:
    """A class in H^{2i}_amb: coordinates in the model basis plus numerical coordinates."""

    degree: int
    coords: tuple[Fraction, ...]
    num_coords: tuple[Fraction, ...]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coords)


class ToricModel:
    """Intersection theory of ``X_fan`` restricted to an anticanonical ``Y``."""

    def __init__(self, fan: Fan):
        if not fan.is_unimodular():
            raise NotUnimodular("the fan is not unimodular")
        self.fan = fan
        self.d = fan.rank - 1
        self._memo: dict[Multiset, int] = {}
        self._lock = threading.Lock()
        # square-free monomials that are cones, by degree
        self.square_free: list[list[Multiset]] = [
            [()]] + [sorted(_key(c) for c in fan.all_cones() if len(c) == i)
                     for i in range(1, self.d + 1)]
        self._bases: list[list[Multiset]] = []
        self._pairings: list[list[list[Fraction]]] = []
        self._dual_inverse: list[list[list[Fraction]]] = []
        for i in range(self.d + 1):
            basis, pairing = self._select_basis(i)
            self._bases.append(basis)
            self._pairings.append(pairing)
        for i in range(self.d + 1):
            self._dual_inverse.append(inverse(self.pairing_matrix(i)))

    # -- intersection numbers ------------------------------------------------

    def intersection_number(self, m: Sequence[int], with_Y: bool = False,
                            rng: random.Random | None = None) -> int:
        """``D_m1 ... D_m{d+1}`` on X, or ``Y . D_m1 ... D_md`` when ``with_Y``."""
        m = list(m)
        if with_Y:
            if len(m) != self.d:
                raise ValueError(f"need {self.d} divisors with Y")
            return sum(self.intersection_number(m + [r], rng=rng) for r in range(self.fan.n_rays))
        if len(m) != self.fan.rank:
            raise ValueError(f"need {self.fan.rank} divisors")
        if rng is not None:
            return self._intersect(_key(m), rng)
        key = _key(m)
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        val = self._intersect(key, None)
        with self._lock:
            self._memo[key] = val
        return val

    def _intersect(self, m: Multiset, rng: random.Random | None) -> int:
        support = sorted(set(m))
        if not self.fan.is_cone(support):
            return 0
        if len(support) == len(m):
            return 1
        counts = {r: m.count(r) for r in support}
        repeated = [r for r in support if counts[r] > 1]
        rho = rng.choice(repeated) if rng is not None else repeated[0]
        n = reduction_covector(self.fan, rho, support, rng)
        rest = list(m)
        rest.remove(rho)
        total = 0
        for r in range(self.fan.n_rays):
            if r in support:
                continue
            c = dot(self.fan.rays[r], n)
            if c:
                sub = _key(rest + [r])
                total -= c * (self._intersect(sub, rng) if rng is not None
                              else self.intersection_number(sub))
        return total

    # -- graded bases ---------------------------------------------------------

    def _numerical(self, monomial: Sequence[int], i: int) -> list[Fraction]:
        """Pairings of a degree-i monomial with every dual square-free monomial."""
        return [Fraction(self.intersection_number(list(monomial) + list(t), with_Y=True))
                for t in self.square_free[self.d - i]]

    def _select_basis(self, i: int) -> tuple[list[Multiset], list[list[Fraction]]]:
        cands = self.square_free[i]
        rows = [self._numerical(c, i) for c in cands]
        idx = independent_rows(rows)
        return [cands[k] for k in idx], [rows[k] for k in idx]

    def amb_graded_basis(self, i: int) -> tuple[list[Multiset], list[list[Fraction]]]:
        """Monomial representatives of a basis of H^{2i}_amb and their pairing with the
        basis of the complementary degree."""
        if not 0 <= i <= self.d:
            raise ValueError("degree out of range")
        return list(self._bases[i]), self.pairing_matrix(i)

    def pairing_matrix(self, i: int) -> list[list[Fraction]]:
        return [[Fraction(self.intersection_number(list(a) + list(b), with_Y=True))
                 for b in self._bases[self.d - i]] for a in self._bases[i]]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self._bases)

    @property
    def rank(self) -> int:
        return sum(self.dims)

    def offsets(self) -> list[int]:
        out, s = [], 0
        for k in self.dims:
            out.append(s)
            s += k
        return out

    def full_basis(self) -> list[tuple[int, Multiset]]:
        return [(i, b) for i in range(self.d + 1) for b in self._bases[i]]

    # -- classes -----------------------------------------------------------------

    def from_numerical(self, i: int, num: Sequence) -> CohClass:
        num = [Fraction(x) for x in num]
        cols = [self.square_free[self.d - i].index(b) for b in self._bases[self.d - i]]
        restricted = [num[c] for c in cols]
        # coords @ P = restricted, with P the pairing of degree i with degree d-i
        coords = mat_mul([restricted], self._dual_inverse[i])[0] if cols else []
        return CohClass(i, tuple(coords), tuple(num))

    def from_coords(self, i: int, coords: Sequence) -> CohClass:
        coords = [Fraction(x) for x in coords]
        num = [Fraction(0)] * len(self.square_free[self.d - i])
        for c, b in zip(coords, self._bases[i]):
            if c:
                num = [u + c * v for u, v in zip(num, self._numerical(b, i))]
        return CohClass(i, tuple(coords), tuple(num))

    def monomial_class(self, m: Sequence[int]) -> CohClass:
        i = len(m)
        if i > self.d:
            raise DegreeOverflow(f"degree {i} exceeds {self.d}")
        return self.from_numerical(i, self._numerical(m, i))

    def unit(self) -> CohClass:
        return self.monomial_class(())

    def zero(self, i: int) -> CohClass:
        return self.from_coords(i, [0] * self.dims[i])

    def divisor_class(self, a: Sequence[int]) -> CohClass:
        """Class of ``sum a_rho D_rho`` restricted to Y."""
        if len(a) != self.fan.n_rays:
            raise ValueError("one coefficient per ray expected")
        num = [Fraction(0)] * len(self.square_free[self.d - 1])
        for r, ar in enumerate(a):
            if ar:
                row = self._numerical((r,), 1)
                num = [x + ar * y for x, y in zip(num, row)]
        return self.from_numerical(1, num)

    def pair_with_monomial(self, x: CohClass, m: Sequence[int]) -> Fraction:
        """``Y . x . D_m`` for a monomial of complementary degree."""
        if x.degree + len(m) != self.d:
            raise ValueError("degrees do not add up to d")
        return sum((c * self.intersection_number(list(b) + list(m), with_Y=True)
                    for c, b in zip(x.coords, self._bases[x.degree])), Fraction(0))

    def cup_divisor(self, x: CohClass, a: Sequence[int]) -> CohClass:
        """``(sum a_rho D_rho) . x`` via transposed pairings."""
        if x.degree >= self.d:
            raise DegreeOverflow("cup product would exceed the top degree")
        i = x.degree + 1
        num = []
        for t in self.square_free[self.d - i]:
            num.append(sum((ar * self.pair_with_monomial(x, (r,) + tuple(t))
                            for r, ar in enumerate(a) if ar), Fraction(0)))
        return self.from_numerical(i, num)

    def product(self, x: CohClass, y: CohClass) -> CohClass | None:
        """Cup product; None if the degree exceeds d (the class is zero)."""
        i = x.degree + y.degree
        if i > self.d:
            return None
        num = [Fraction(0)] * len(self.square_free[self.d - i])
        for cx, bx in zip(x.coords, self._bases[x.degree]):
            if not cx:
                continue
            for cy, by in zip(y.coords, self._bases[y.degree]):
                if not cy:
                    continue
                row = self._numerical(tuple(bx) + tuple(by), i)
                num = [u + cx * cy * v for u, v in zip(num, row)]
        return self.from_numerical(i, num)

    def top_pairing(self, x: CohClass, y: CohClass) -> Fraction:
        """``<x y>`` on Y; zero unless the degrees are complementary."""
        if x.degree + y.degree != self.d:
            return Fraction(0)
        return sum((cx * cy * self.intersection_number(list(bx) + list(by), with_Y=True)
                    for cx, bx in zip(x.coords, self._bases[x.degree])
                    for cy, by in zip(y.coords, self._bases[y.degree])), Fraction(0))

    def integral(self, x: CohClass) -> Fraction:
        """``int_Y x`` for a top-degree class."""
        return self.top_pairing(x, self.unit()) if x.degree == self.d else Fraction(0)

    # -- flat vectors over the full graded basis ---------------------------------

    def split(self, vec: Sequence) -> list[list]:
        o = self.offsets()
        return [list(vec[o[i]:o[i] + self.dims[i]]) for i in range(self.d + 1)]

    def flatten(self, classes: Sequence[CohClass | None]) -> list[Fraction]:
        out: list[Fraction] = []
        for i in range(self.d + 1):
            c = next((x for x in classes if x is not None and x.degree == i), None)
            out.extend(c.coords if c is not None else [Fraction(0)] * self.dims[i])
        return out

    def structure_constants(self) -> dict[tuple[int, int], list[Fraction]]:
        """``e_a e_b`` in the full basis for every pair of full-basis indices."""
        if hasattr(self, "_structure"):
            return self._structure
        basis = self.full_basis()
        units = [self.from_coords(i, [int(k == j) for k in range(self.dims[i])])
                 for i in range(self.d + 1) for j in range(self.dims[i])]
        table = {}
        for a, b in itertools.product(range(len(basis)), repeat=2):
            p = self.product(units[a], units[b])
            table[(a, b)] = self.flatten([p]) if p is not None else [Fraction(0)] * self.rank
        self._structure = table
        return table

    def multiply(self, u: Sequence, v: Sequence) -> list:
        """Product of two full-basis vectors with entries in any ring containing Q."""
        table = self.structure_constants()
        out = [0 * u[0]] * self.rank
        for a, ua in enumerate(u):
            if ua == 0:
                continue
            for b, vb in enumerate(v):
                if vb == 0:
                    continue
                for k, c in enumerate(table[(a, b)]):
                    if c:
                        out[k] = out[k] + ua * vb * c
        return out

    def degree_of_index(self) -> list[int]:
        return [i for i in range(self.d + 1) for _ in range(self.dims[i])]

    def top_functional(self) -> list[Fraction]:
        """``int_Y e_a`` for every full-basis vector."""
        out = []
        for i in range(self.d + 1):
            for b in self._bases[i]:
                out.append(Fraction(self.intersection_number(list(b), with_Y=True))
                           if i == self.d else Fraction(0))
        return out
