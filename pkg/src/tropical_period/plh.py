"""The tropical period: nilpotent operator, monodromy, filtration and pairing on H_amb.

Matrices act on column vectors in the full graded basis of the toric model
(degree 0 first).  Powers of 2*pi*i are carried exactly by ``ScaledScalar``;
only the positivity sweep leaves exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import NonIntegralMonodromy, OutOfRange, SubspaceDimMismatch
from .lattice_core import identity, inverse, mat_add, mat_mul, mat_scale, rank
from .radiance import RadianceClass
from .toric_cohomology import ToricModel

mpmath.mp.dps = 40
TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class ScaledScalar:
    """``r * (2 pi i)^p`` with rational ``r``."""

    r: Fraction
    p: int = 0

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        if self.r == 0:
            object.__setattr__(self, "p", 0)

    def is_zero(self) -> bool:
        return self.r == 0

    def __add__(self, other: "ScaledScalar") -> "ScaledScalar":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.p != other.p:
            raise ValueError(f"cannot add (2 pi i)^{self.p} and (2 pi i)^{other.p} terms")
        return ScaledScalar(self.r + other.r, self.p)

    def __neg__(self) -> "ScaledScalar":
        return ScaledScalar(-self.r, self.p)

    def __sub__(self, other: "ScaledScalar") -> "ScaledScalar":
        return self + (-other)

    def __mul__(self, other) -> "ScaledScalar":
        if isinstance(other, ScaledScalar):
            return ScaledScalar(self.r * other.r, self.p + other.p)
        return ScaledScalar(self.r * Fraction(other), self.p)

    __rmul__ = __mul__

    def numeric(self) -> mpmath.mpc:
        return mpmath.mpf(self.r.numerator) / self.r.denominator * (2j * mpmath.pi) ** self.p

    def __complex__(self) -> complex:
        return complex(self.numeric())

    def __str__(self) -> str:
        return str(self.r) if self.p == 0 else f"{self.r}*(2pi i)^{self.p}"


ZERO = ScaledScalar(Fraction(0))


def scaled_sum(terms) -> ScaledScalar:
    total = ZERO
    for t in terms:
        total = total + t
    return total


def scaled_matmul(A: Sequence[Sequence[ScaledScalar]], B: Sequence[Sequence[ScaledScalar]]):
    return [[scaled_sum(A[i][k] * B[k][j] for k in range(len(B)))
             for j in range(len(B[0]))] for i in range(len(A))]


def to_complex(A) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in A], dtype=complex)


# ---------------------------------------------------------------------------

@dataclass
class PLHData:
    model: ToricModel
    c: RadianceClass
    N: list[list[Fraction]]
    monodromy: list[list[ScaledScalar]]
    gram: list[list[ScaledScalar]]
    degrees: list[int]
    weight: int
    extra: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.weight

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.model.dims

    def labels(self) -> list[str]:
        out = []
        for i, b in self.model.full_basis():
            out.append("1" if not b else "*".join(f"D{r}" for r in b))
        return out


def nilpotent_operator(model: ToricModel, c: RadianceClass) -> list[list[Fraction]]:
    """Matrix of ``x -> c_B x``; column j is the image of the j-th basis vector."""
    cb = model.flatten([c.cls])
    n = model.rank
    cols = [model.multiply(cb, [Fraction(int(k == j)) for k in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _exp_scaled(N, degrees) -> list[list[ScaledScalar]]:
    """``exp(-2 pi i N)`` entrywise: entry (a, b) is a single (2 pi i)^k term, k = deg a - deg b."""
    n = len(N)
    powers = [identity(n, Fraction(1))]
    for _ in range(max(degrees) if degrees else 0):
        powers.append(mat_mul(N, powers[-1]))
    out = []
    for a in range(n):
        row = []
        for b in range(n):
            k = degrees[a] - degrees[b]
            if k < 0 or k >= len(powers):
                row.append(ZERO)
            else:
                row.append(ScaledScalar((-1) ** k * powers[k][a][b] / math.factorial(k), k))
        out.append(row)
    return out


def exp_rational(N, scale=Fraction(1)) -> list[list[Fraction]]:
    """``exp(scale * N)`` for nilpotent rational ``N``."""
    n = len(N)
    out = identity(n, Fraction(1))
    term = identity(n, Fraction(1))
    for k in range(1, n + 1):
        term = mat_scale(Fraction(scale) / k, mat_mul(N, term))
        if all(x == 0 for row in term for x in row):
            break
        out = mat_add(out, term)
    return out


def q_trop_pair(model: ToricModel, a, b) -> ScaledScalar:
    """``(2 pi i)^d (-1)^{deg a} <a b>`` for classes or monomial tuples."""
    da, db = (x.degree if hasattr(x, "degree") else len(x) for x in (a, b))
    if da + db != model.d:
        return ZERO
    if hasattr(a, "degree"):
        val = model.top_pairing(a, b)
    else:
        val = Fraction(model.intersection_number(list(a) + list(b), with_Y=True))
    return ScaledScalar((-1) ** da * val, model.d)


def build_plh(model: ToricModel, c: RadianceClass) -> PLHData:
    N = nilpotent_operator(model, c)
    degrees = model.degree_of_index()
    basis = [b for _, b in model.full_basis()]
    gram = [[q_trop_pair(model, a, b) for b in basis] for a in basis]
    return PLHData(model, c, N, _exp_scaled(N, degrees), gram, degrees, model.d)


def monodromy_matrix(plh: PLHData, basis: str = "monomial", lattice=None,
                     tolerance: float = 1e-9):
    """Monodromy ``exp(-2 pi i N)``.

    ``basis="monomial"`` gives the ScaledScalar matrix.  ``basis="gamma"`` gives
    the integer matrix in the lattice basis; it is first computed numerically,
    rounded, and then re-verified exactly through the rational Chern character
    coordinates of the lattice generators.
    """
    if basis == "monomial":
        return plh.monodromy
    if basis != "gamma":
        raise ValueError("basis must be 'monomial' or 'gamma'")
    if lattice is None:
        raise ValueError("the gamma basis needs a lattice")
    G = lattice.complex_matrix
    T = to_complex(plh.monodromy)
    M = np.linalg.solve(G, T @ G)
    rounded = np.rint(M.real)
    deviation = float(np.max(np.abs(M - rounded))) if M.size else 0.0
    if deviation > tolerance:
        raise NonIntegralMonodromy(f"gamma-basis monodromy deviates from integers by {deviation:.3e}")
    ints = [[int(x) for x in row] for row in rounded]
    # exact: the (2 pi i)-rescaling turns exp(-2 pi i N) into exp(-N) on ch coordinates
    C = lattice.ch_matrix
    exact = mat_mul(inverse(C), mat_mul(exp_rational(plh.N, -1), C))
    if exact != [[Fraction(x) for x in row] for row in ints]:
        raise NonIntegralMonodromy("rounded gamma-basis monodromy fails exact re-verification")
    plh.extra["gamma_deviation"] = deviation
    return ints


def monodromy_preserves_pairing(plh: PLHData) -> bool:
    T, Q = plh.monodromy, plh.gram
    n = plh.dim
    for a in range(n):
        for b in range(n):
            s = scaled_sum(T[c][a] * T[e][b] * Q[c][e] for c in range(n) for e in range(n))
            if s != Q[a][b] and not (s.is_zero() and Q[a][b].is_zero()):
                return False
    return True


def pairing_symmetric(plh: PLHData) -> bool:
    sign = (-1) ** plh.d
    n = plh.dim
    return all(plh.gram[a][b] == plh.gram[b][a] * sign for a in range(n) for b in range(n))


# ---------------------------------------------------------------------------
# filtration

def filtration_indices(plh: PLHData, p: int) -> list[int]:
    if not 0 <= p <= plh.d:
        raise OutOfRange(f"filtration index {p} outside 0..{plh.d}")
    return [k for k, deg in enumerate(plh.degrees) if deg <= plh.d - p]


def filtration_basis(plh: PLHData, p: int) -> list[list[Fraction]]:
    """Column vectors spanning ``F^p`` (degrees ``0..d-p``)."""
    n = plh.dim
    return [[Fraction(int(i == k)) for i in range(n)] for k in filtration_indices(plh, p)]


def default_filtration(plh: PLHData) -> dict[int, list[list[Fraction]]]:
    return {p: filtration_basis(plh, p) for p in range(plh.d + 1)}


def corrupted_filtration(plh: PLHData, i: int = 0, j: int = 1) -> dict[int, list[list[Fraction]]]:
    """Filtration with the graded pieces of degrees ``i`` and ``j`` exchanged."""
    swap = {i: j, j: i}
    n = plh.dim
    out = {}
    for p in range(plh.d + 1):
        allowed = {swap.get(k, k) for k in range(plh.d - p + 1)}
        out[p] = [[Fraction(int(r == k)) for r in range(n)]
                  for k, deg in enumerate(plh.degrees) if deg in allowed]
    return out


def _contains(big: list[list[Fraction]], vecs: list[list[Fraction]]) -> bool:
    if not vecs:
        return True
    return rank(big + vecs) == rank(big) if big else all(all(x == 0 for x in v) for v in vecs)


def _apply(A, v):
    return [sum((A[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(A))]


@dataclass
class StructureReport:
    griffiths: dict[int, bool]
    orthogonality: dict[int, bool]
    hodge_numbers: dict[int, int]
    hodge_accounting: bool

    @property
    def ok(self) -> bool:
        return all(self.griffiths.values()) and all(self.orthogonality.values()) and self.hodge_accounting


def structure_checks(plh: PLHData, filtration: dict[int, list[list[Fraction]]] | None = None
                     ) -> StructureReport:
    """Griffiths transversality and orthogonality, exactly, for ``filtration``."""
    F = filtration if filtration is not None else default_filtration(plh)
    d, n = plh.d, plh.dim
    full = [[Fraction(int(i == k)) for i in range(n)] for k in range(n)]

    def piece(p):
        if p <= 0:
            return F.get(0, full) if p == 0 else full
        return F.get(p, []) if p <= d else []

    griffiths = {p: _contains(piece(p - 1), [_apply(plh.N, v) for v in piece(p)])
                 for p in range(1, d + 1)}
    Q = plh.gram
    orth = {}
    for p in range(0, d + 2):
        A, B = piece(p), piece(d + 1 - p)
        orth[p] = all(
            scaled_sum(Q[a][b] * (u[a] * w[b]) for a in range(n) for b in range(n) if u[a] and w[b]).is_zero()
            for u in A for w in B)
    hodge = {p: rank(piece(p)) - rank(piece(p + 1)) if piece(p + 1) else rank(piece(p))
             for p in range(d + 1)}
    accounting = all(hodge[p] == plh.dims[d - p] for p in range(d + 1)) and sum(hodge.values()) == n
    return StructureReport(griffiths, orth, hodge, accounting)


# ---------------------------------------------------------------------------
# nilpotent orbit and positivity

def orbit_operator(plh: PLHData, z: complex) -> np.ndarray:
    """``exp(-2 pi i z N)`` by its finite series."""
    N = np.array([[float(x) for x in row] for row in plh.N], dtype=complex)
    out = np.eye(plh.dim, dtype=complex)
    term = np.eye(plh.dim, dtype=complex)
    for k in range(1, plh.d + 1):
        term = (-TWO_PI_I * z / k) * (N @ term)
        out = out + term
    return out


def nilpotent_orbit(plh: PLHData, z: complex) -> dict[int, np.ndarray]:
    """Column bases of ``F^p(z)`` for ``p = 0..d``."""
    if complex(z).imag <= 0:
        raise ValueError("the nilpotent orbit needs Im z > 0")
    E = orbit_operator(plh, z)
    return {p: E[:, filtration_indices(plh, p)] for p in range(plh.d + 1)}


def gram_numeric(plh: PLHData) -> np.ndarray:
    return to_complex(plh.gram)


def _mp_orth(A: mpmath.matrix, rtol) -> mpmath.matrix:
    """Orthonormal basis of the column span (relative singular-value cutoff)."""
    if A.cols == 0:
        return A
    U, S, _ = mpmath.svd_c(A, full_matrices=False)
    top = max(S) if len(S) else 0
    keep = [j for j in range(len(S)) if S[j] > rtol * top]
    out = mpmath.matrix(A.rows, len(keep))
    for k, j in enumerate(keep):
        for i in range(A.rows):
            out[i, k] = U[i, j]
    return out


def _mp_intersect(A: mpmath.matrix, B: mpmath.matrix, rtol) -> mpmath.matrix:
    """Orthonormal basis of the intersection of two column spans."""
    A, B = _mp_orth(A, rtol), _mp_orth(B, rtol)
    n = A.rows
    if A.cols == 0 or B.cols == 0:
        return _empty(n)
    M = mpmath.matrix(n, A.cols + B.cols)
    for i in range(n):
        for j in range(A.cols):
            M[i, j] = A[i, j]
        for j in range(B.cols):
            M[i, A.cols + j] = -B[i, j]
    _, S, V = mpmath.svd_c(M, full_matrices=True)
    sv = [S[k] if k < len(S) else 0 for k in range(M.cols)]
    null = [k for k in range(M.cols) if sv[k] <= rtol * max(S)]
    if not null:
        return _empty(n)
    X = mpmath.matrix(n, len(null))
    for c, k in enumerate(null):
        # rows of V are the right singular vectors (conjugated)
        coeffs = [mpmath.conj(V[k, j]) for j in range(A.cols)]
        for i in range(n):
            X[i, c] = mpmath.fsum(A[i, j] * coeffs[j] for j in range(A.cols))
    return _mp_orth(X, rtol)


def _empty(n: int) -> mpmath.matrix:
    return mpmath.matrix(n, 0)


@dataclass
class PositivityEntry:
    y: float
    p: int
    q: int
    dim: int
    min_eigenvalue: float
    hermitian_defect: float
    positive: bool


@dataclass
class PositivityReport:
    entries: list[PositivityEntry]
    tolerance: float

    @property
    def ok(self) -> bool:
        return all(e.positive for e in self.entries)

    def smallest(self) -> float:
        return min(e.min_eigenvalue for e in self.entries)


REAL_STRUCTURES = ("unit_real", "lattice")


def _lattice_mp(lattice) -> mpmath.matrix:
    vecs = getattr(lattice, "vectors", None)
    if vecs:
        return mpmath.matrix([[v.coords[i] for v in vecs] for i in range(len(vecs[0].coords))])
    return mpmath.matrix(lattice.complex_matrix.tolist())


def _kappa_mp(G: mpmath.matrix, Ginv: mpmath.matrix, X: mpmath.matrix, sign: int) -> mpmath.matrix:
    Y = Ginv * X
    for i in range(Y.rows):
        for j in range(Y.cols):
            Y[i, j] = mpmath.conj(Y[i, j])
    return (G * Y) * sign


def _check_real_structure(real_structure: str) -> None:
    if real_structure not in REAL_STRUCTURES:
        raise ValueError(f"unknown real structure {real_structure!r}")


def kappa(lattice, vecs: np.ndarray, d: int = 0, real_structure: str = "unit_real") -> np.ndarray:
    """Complex conjugation with respect to a real structure built from the lattice.

    ``"lattice"`` is the real span of the lattice itself.  ``"unit_real"`` is the
    real span of ``i^d`` times the lattice, in which the unit class is real; the
    two differ by the sign ``(-1)^d`` and agree for even ``d``.
    """
    _check_real_structure(real_structure)
    G = lattice.complex_matrix
    out = G @ np.conj(np.linalg.solve(G, vecs))
    return out * (-1) ** d if real_structure == "unit_real" else out


def _orbit_mp(plh: PLHData, y) -> mpmath.matrix:
    """``exp(2 pi y N)``: the orbit operator at ``z = i y``."""
    n = plh.dim
    N = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in plh.N])
    out = mpmath.eye(n)
    term = mpmath.eye(n)
    for k in range(1, plh.d + 1):
        term = (N * term) * (2 * mpmath.pi * y / k)
        out = out + term
    return out


def positivity_sweep(plh: PLHData, ys: Sequence[float], lattice, tolerance: float = 1e-9,
                     real_structure: str = "unit_real") -> PositivityReport:
    """Hermitian forms ``i^{p-q} Q(phi, kappa phi)`` on ``H^{p,q}(iy)``.

    Linear algebra runs in mpmath at the module precision: for d = 3 the orbit
    operator has entries of size ``(2 pi y)^3`` and double precision loses the
    intersections at moderate y.
    """
    _check_real_structure(real_structure)
    if any(y <= 0 for y in ys):
        raise ValueError("y values must be positive")
    d = plh.d
    sign = (-1) ** d if real_structure == "unit_real" else 1
    rtol = mpmath.mpf(10) ** (-(mpmath.mp.dps // 2))
    Q = mpmath.matrix([[x.numeric() for x in row] for row in plh.gram])
    G = _lattice_mp(lattice)
    Ginv = G ** -1
    entries = []
    for y in ys:
        E = _orbit_mp(plh, mpmath.mpf(y))
        F = {}
        for p in range(d + 1):
            idx = filtration_indices(plh, p)
            F[p] = mpmath.matrix([[E[i, j] for j in idx] for i in range(plh.dim)])
        for p in range(d + 1):
            q = d - p
            H = _mp_intersect(F[p], _kappa_mp(G, Ginv, F[q], sign), rtol)
            expected = plh.dims[d - p]
            if H.cols != expected:
                raise SubspaceDimMismatch(
                    f"H^{p},{q} at y={y} has dimension {H.cols}, expected {expected}")
            # M_jk = i^{p-q} Q(h_j, kappa h_k): linear in j, antilinear in k
            form = (H.T * Q * _kappa_mp(G, Ginv, H, sign)) * (mpmath.mpc(0, 1) ** (p - q))
            herm = (form + form.H) * mpmath.mpf(0.5)
            defect = max((abs(form[i, j] - mpmath.conj(form[j, i]))
                          for i in range(form.rows) for j in range(form.cols)), default=0)
            eig, _ = mpmath.eighe(herm)
            lo = float(min(eig[i] for i in range(len(eig))))
            entries.append(PositivityEntry(float(y), p, q, H.cols, lo, float(defect), lo > tolerance))
    return PositivityReport(entries, tolerance)
