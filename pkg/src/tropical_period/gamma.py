"""Characteristic classes of Y and the Gamma-class integral lattice on H_amb."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import NonIntegralMonodromy, SpanFailure
from .lattice_core import independent_rows, lattice_index
from .plh import PLHData, gram_numeric, monodromy_matrix
from .toric_cohomology import CohClass, ToricModel

mpmath.mp.dps = 40


def to_mpf(x: Fraction) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _split_classes(model: ToricModel, vec: Sequence[Fraction]) -> list[CohClass]:
    return [model.from_coords(i, part) for i, part in enumerate(model.split(vec))]


def exp_divisor(model: ToricModel, a: Sequence[int]) -> list[Fraction]:
    """``e^{sum a_rho D_rho}`` on H_amb as a full-basis vector."""
    x = model.flatten([model.divisor_class(a)])
    out = model.flatten([model.unit()])
    term = list(out)
    for k in range(1, model.d + 1):
        term = [t / k for t in model.multiply(term, x)]
        out = [u + t for u, t in zip(out, term)]
    return out


@dataclass
class CharacteristicData:
    ch_TX: list[Fraction]
    ch_TY: list[Fraction]
    chern_TY: list[Fraction]
    euler_number: int
    model: ToricModel = field(repr=False)

    def ch_classes(self) -> list[CohClass]:
        return _split_classes(self.model, self.ch_TY)

    def chern_classes(self) -> list[CohClass]:
        return _split_classes(self.model, self.chern_TY)

    def component(self, vec: Sequence[Fraction], k: int) -> list[Fraction]:
        """Full-basis vector keeping only degree ``k``."""
        degs = self.model.degree_of_index()
        return [x if degs[i] == k else Fraction(0) for i, x in enumerate(vec)]


def characteristic_data(model: ToricModel) -> CharacteristicData:
    n = model.fan.n_rays
    unit = model.flatten([model.unit()])
    ch_tx = [-(n - model.d - 1) * u for u in unit]
    for r in range(n):
        e = exp_divisor(model, [int(k == r) for k in range(n)])
        ch_tx = [x + y for x, y in zip(ch_tx, e)]
    eY = exp_divisor(model, [1] * n)
    ch_ty = [x - y for x, y in zip(ch_tx, eY)]
    degs = model.degree_of_index()
    # Newton identities: k c_k = sum_i (-1)^{i-1} c_{k-i} p_i with p_i = i! ch_i
    power = [[Fraction(math.factorial(i)) * x if degs[j] == i else Fraction(0)
              for j, x in enumerate(ch_ty)] for i in range(model.d + 1)]
    c = [unit]
    for k in range(1, model.d + 1):
        acc = [Fraction(0)] * model.rank
        for i in range(1, k + 1):
            prod = model.multiply(c[k - i], power[i])
            acc = [a + (-1) ** (i - 1) * b for a, b in zip(acc, prod)]
        c.append([a / k for a in acc])
    total = [sum(parts) for parts in zip(*c)]
    top = c[model.d]
    euler = sum(x * f for x, f in zip(top, model.top_functional()))
    assert euler.denominator == 1
    return CharacteristicData(ch_tx, ch_ty, total, int(euler), model)


def _mp_multiply(model: ToricModel, u, v):
    table = model.structure_constants()
    out = [mpmath.mpf(0)] * model.rank
    for a, ua in enumerate(u):
        if ua == 0:
            continue
        for b, vb in enumerate(v):
            if vb == 0:
                continue
            for k, c in enumerate(table[(a, b)]):
                if c:
                    out[k] += ua * vb * to_mpf(c)
    return out


def gamma_class_Y(cd: CharacteristicData) -> list[mpmath.mpf]:
    """``Gamma_Y`` as a real full-basis vector (degree-0 coefficient 1)."""
    model = cd.model
    d = model.d
    if d > 3:
        raise ValueError("the Gamma class series is implemented for d <= 3")
    c1 = cd.component(cd.chern_TY, 1)
    if any(c1):
        raise ArithmeticError("c_1(TY) is nonzero; Y is not Calabi-Yau")
    log = [mpmath.mpf(0)] * model.rank
    for k in range(2, d + 1):
        coef = (-1) ** k * mpmath.zeta(k) * math.factorial(k - 1)
        for i, x in enumerate(cd.component(cd.ch_TY, k)):
            log[i] += coef * to_mpf(x)
    out = [to_mpf(x) for x in model.flatten([model.unit()])]
    term = list(out)
    for j in range(1, d + 1):
        term = [t / j for t in _mp_multiply(model, term, log)]
        out = [a + b for a, b in zip(out, term)]
    return out


@dataclass(frozen=True)
class GammaVector:
    exponents: tuple[int, ...]
    coords: tuple[mpmath.mpc, ...]

    def as_complex(self) -> np.ndarray:
        return np.array([complex(x) for x in self.coords], dtype=complex)


def gamma_vector(model: ToricModel, gamma_hat, a: Sequence[int],
                 ch: Sequence[Fraction] | None = None) -> GammaVector:
    """``(2 pi i)^{-d} Gamma_Y (2 pi i)^{deg/2} ch(E)`` for ``E = O(sum a_rho D_rho)``."""
    ch = exp_divisor(model, a) if ch is None else ch
    tpi = 2j * mpmath.pi
    degs = model.degree_of_index()
    scaled = [to_mpf(x) * tpi ** degs[i] for i, x in enumerate(ch)]
    table = model.structure_constants()
    out = [mpmath.mpc(0)] * model.rank
    for i, g in enumerate(gamma_hat):
        if g == 0:
            continue
        for j, s in enumerate(scaled):
            if s == 0:
                continue
            for k, c in enumerate(table[(i, j)]):
                if c:
                    out[k] += g * s * to_mpf(c)
    factor = tpi ** (-model.d)
    return GammaVector(tuple(a), tuple(factor * x for x in out))


def box_order(a: Sequence[int]):
    """Non-negative exponents first, then by size."""
    neg = sum(1 for x in a if x < 0)
    return (neg > 0, sum(abs(x) for x in a), neg, tuple(-x for x in a))


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    den = 1
    for row in rows:
        for x in row:
            q = Fraction(x).denominator
            den = den * q // math.gcd(den, q)
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


def hnf_with_combinations(rows: Sequence[Sequence[int]]) -> list[tuple[list[int], dict[int, int]]]:
    """Echelon basis of the Z-span of ``rows``, each basis row with its integer combination."""
    pool = [(list(r), {k: 1}) for k, r in enumerate(rows) if any(r)]
    ncols = len(rows[0]) if rows else 0
    basis = []
    for col in range(ncols):
        active = [item for item in pool if item[0][col] != 0]
        while len(active) > 1:
            active.sort(key=lambda it: abs(it[0][col]))
            pr, pc = active[0]
            for row, combo in active[1:]:
                q = row[col] // pr[col]
                for j in range(ncols):
                    row[j] -= q * pr[j]
                for k, v in pc.items():
                    combo[k] = combo.get(k, 0) - q * v
            active = [item for item in active if item[0][col] != 0]
        if active:
            pivot = active[0]
            pool = [item for item in pool if item is not pivot and any(item[0])]
            basis.append((pivot[0], {k: v for k, v in pivot[1].items() if v}))
        else:
            pool = [item for item in pool if any(item[0])]
    return basis


@dataclass
class GammaLattice:
    """Lattice generators with their provenance.

    ``combinations[j]`` lists ``(coefficient, exponent vector)`` pairs; a single
    pair with coefficient 1 is an honest line bundle.
    """

    combinations: list[list[tuple[int, tuple[int, ...]]]]
    ch_matrix: list[list[Fraction]]       # columns: ch coordinates
    complex_matrix: np.ndarray            # columns: Gamma vectors
    vectors: list[GammaVector]
    greedy_index: int
    virtual: bool

    @property
    def exponents(self) -> list[tuple[int, ...]]:
        return [c[0][1] for c in self.combinations]


def line_bundle_lattice(model: ToricModel):
    """Basis of the Z-span of ``ch`` of all line bundles, with combinations of box bundles.

    ``e^{a.D}`` is an integer combination of ``prod (e^{D_rho} - 1)^{k_rho}`` with
    ``k_rho <= d``, so exponents in ``{0..d}^n`` already generate everything.
    """
    d, n = model.d, model.fan.n_rays
    box = list(itertools.product(range(d + 1), repeat=n))
    chs = [exp_divisor(model, a) for a in box]
    ints, den = _integer_rows(chs)
    basis = hnf_with_combinations(ints)
    return [([Fraction(x, den) for x in row], [(c, box[k]) for k, c in sorted(combo.items())])
            for row, combo in basis], den


def lattice_basis(model: ToricModel, gamma_hat, bound: int | None = None,
                  order=box_order) -> GammaLattice:
    """Greedy basis of Gamma vectors of line bundles with exponents in ``[-bound, bound]``.

    When the greedy line bundles only span a sublattice of finite index, the
    basis is replaced by an echelon basis of virtual bundles.
    """
    d, n = model.d, model.fan.n_rays
    bound = d if bound is None else bound
    box = sorted(itertools.product(range(-bound, bound + 1), repeat=n), key=order)
    chosen: list[tuple[int, ...]] = []
    chs: list[list[Fraction]] = []
    seen = set()
    for a in box:
        ch = exp_divisor(model, a)
        key = tuple(ch)
        if key in seen:
            continue
        seen.add(key)
        if len(independent_rows(chs + [ch])) == len(chs) + 1:
            chosen.append(a)
            chs.append(ch)
            if len(chs) == model.rank:
                break
    if len(chs) < model.rank:
        raise SpanFailure(f"exponent box of radius {bound} spans only {len(chs)} of {model.rank}")

    full, den = line_bundle_lattice(model)
    index = lattice_index([[int(x * den) for x in ch] for ch in chs],
                          [[int(x * den) for x in row] for row, _ in full])
    combos = [[(1, a)] for a in chosen]
    virtual = index != 1
    if virtual:
        chs = [row for row, _ in full]
        combos = [combo for _, combo in full]
    vecs = [GammaVector(combo[0][1] if not virtual else (), gamma_vector(model, gamma_hat, (), ch=ch).coords)
            for ch, combo in zip(chs, combos)]
    C = [[chs[j][i] for j in range(len(chs))] for i in range(model.rank)]
    G = np.array([[complex(v.coords[i]) for v in vecs] for i in range(model.rank)], dtype=complex)
    return GammaLattice(combos, C, G, vecs, index, virtual)


# ---------------------------------------------------------------------------

@dataclass
class LatticeCheck:
    name: str
    ok: bool
    value: object = None


@dataclass
class LatticeReport:
    checks: list[LatticeCheck]
    monodromy: list[list[int]] | None
    gram: list[list[int]] | None
    monodromy_deviation: float | None
    gram_deviation: float | None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def get(self, name: str) -> LatticeCheck:
        return next(c for c in self.checks if c.name == name)


def gram_in_lattice(plh: PLHData, lattice: GammaLattice) -> np.ndarray:
    G = lattice.complex_matrix
    return G.T @ gram_numeric(plh) @ G


def lattice_checks(plh: PLHData, lattice: GammaLattice, tolerance: float = 1e-9) -> LatticeReport:
    """Integrality of monodromy and pairing in the lattice basis; collects failures."""
    checks = []
    mono = None
    mono_dev = None
    try:
        mono = monodromy_matrix(plh, "gamma", lattice, tolerance)
        mono_dev = plh.extra.get("gamma_deviation")
        checks.append(LatticeCheck("monodromy_integral", True, mono_dev))
    except NonIntegralMonodromy as exc:
        checks.append(LatticeCheck("monodromy_integral", False, str(exc)))

    Gm = gram_in_lattice(plh, lattice)
    rounded = np.rint(Gm.real)
    gram_dev = float(np.max(np.abs(Gm - rounded))) if Gm.size else 0.0
    gram = [[int(x) for x in row] for row in rounded]
    checks.append(LatticeCheck("gram_integral", gram_dev <= tolerance, gram_dev))
    sign = (-1) ** plh.d
    sym = all(gram[i][j] == sign * gram[j][i] for i in range(len(gram)) for j in range(len(gram)))
    checks.append(LatticeCheck("gram_symmetry", sym, sign))
    if mono is not None:
        M = np.array(mono, dtype=object)
        Gr = np.array(gram, dtype=object)
        preserved = (M.T.dot(Gr).dot(M) == Gr).all()
        checks.append(LatticeCheck("monodromy_preserves_gram", bool(preserved)))
    else:
        checks.append(LatticeCheck("monodromy_preserves_gram", False, "no integral monodromy"))
    return LatticeReport(checks, mono, gram, mono_dev, gram_dev)


def twisted_exponents(a: Sequence[int], h: Sequence[int]) -> tuple[int, ...]:
    """Exponents of ``E tensor O(-c_B)``."""
    return tuple(x - y for x, y in zip(a, h))
