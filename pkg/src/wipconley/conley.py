"""Index maps, Leray reduction and the Conley index as a graded automorphism."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cohomology import GradedMatrix, induced_inclusion, induced_map, invert_iso, matmul
from .grid import CubSet
from .indexpair import WeakIndexPair, build_pair, make_tp
from .mvmap import CombMap

DEGREES = (0, 1)


# -- exact linear algebra over Q ---------------------------------------------------


def _frac(m) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in m]


def rref_columns(m: list[list[Fraction]], rows: int) -> list[int]:
    """Pivot columns of ``m`` (independent columns, leftmost first)."""
    a = [list(r) for r in m]
    cols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                q = a[i][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def solve(b: list[list[Fraction]], y: list[Fraction]) -> list[Fraction]:
    """Solve ``b x = y`` for ``b`` with independent columns (exact, consistent system)."""
    rows, cols = len(b), len(b[0])
    a = [list(b[i]) + [y[i]] for i in range(rows)]
    where = [-1] * cols
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                q = a[i][c]
                a[i] = [x - q * z for x, z in zip(a[i], a[r])]
        where[c] = r
        r += 1
    if any(all(x == 0 for x in a[i][:cols]) and a[i][cols] != 0 for i in range(rows)):
        raise ValueError("inconsistent system")
    return [a[where[c]][cols] if where[c] >= 0 else Fraction(0) for c in range(cols)]


def determinant(m) -> Fraction:
    a = _frac(m)
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            q = a[i][c] / a[c][c]
            a[i] = [x - q * y for x, y in zip(a[i], a[c])]
    return det


# -- polynomials over Q (coefficient tuples, lowest degree first) -------------------

Poly = tuple


def _trim(p) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def p_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return _trim((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def p_scale(p: Poly, c) -> Poly:
    return _trim(c * x for x in p)


def p_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return _trim(out)


def p_divmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 1)
    while len(_trim(r)) >= len(q):
        r = list(_trim(r))
        shift = len(r) - len(q)
        c = Fraction(r[-1]) / q[-1]
        quot[shift] = c
        for i, y in enumerate(q):
            r[i + shift] -= c * y
    return _trim(quot), _trim(r)


def p_monic(p: Poly) -> Poly:
    return p_scale(p, 1 / Fraction(p[-1])) if p else p


def format_poly(p: Poly) -> str:
    """``x^2 - 2x + 1`` style text of a polynomial."""
    if not p:
        return "0"
    terms = []
    for deg in range(len(p) - 1, -1, -1):
        c = Fraction(p[deg])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if deg == 0:
            body = str(mag)
        else:
            coef = "" if mag == 1 else str(mag)
            body = coef + ("x" if deg == 1 else f"x^{deg}")
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def invariant_factors(a: Sequence[Sequence]) -> list[Poly]:
    """Monic invariant factors of degree at least one of a square matrix over Q.

    Computed as the Smith form of ``xI - A`` over ``Q[x]``.
    """
    n = len(a)
    m = [[p_add(((Fraction(0), Fraction(1)) if i == j else ()), (-Fraction(a[i][j]),)) for j in range(n)] for i in range(n)]
    m = [[_trim(x) for x in row] for row in m]
    diag = []
    for p in range(n):
        while True:
            entries = [(len(m[i][j]), i, j) for i in range(p, n) for j in range(p, n) if m[i][j]]
            if not entries:
                break
            _, pi, pj = min(entries)
            m[p], m[pi] = m[pi], m[p]
            for row in m:
                row[p], row[pj] = row[pj], row[p]
            clean = True
            for i in range(p + 1, n):
                if m[i][p]:
                    q, _ = p_divmod(m[i][p], m[p][p])
                    m[i] = [p_add(x, p_scale(p_mul(q, y), -1)) for x, y in zip(m[i], m[p])]
                    if m[i][p]:
                        clean = False
            for j in range(p + 1, n):
                if m[p][j]:
                    q, _ = p_divmod(m[p][j], m[p][p])
                    for row in m:
                        row[j] = p_add(row[j], p_scale(p_mul(q, row[p]), -1))
                    if m[p][j]:
                        clean = False
            if not clean:
                continue
            # enforce divisibility of the remaining block by the pivot
            bad = next(
                ((i, j) for i in range(p + 1, n) for j in range(p + 1, n) if p_divmod(m[i][j], m[p][p])[1]),
                None,
            )
            if bad is None:
                break
            i, _ = bad
            m[p] = [p_add(x, y) for x, y in zip(m[p], m[i])]
        diag.append(p_monic(m[p][p]) if m[p][p] else ())
    return [d for d in diag if len(d) > 1]


# -- graded endomorphisms and the index -----------------------------------------------


@dataclass(frozen=True)
class GradedEndo:
    blocks: dict[int, tuple[tuple, ...]]

    def matrix(self, k: int) -> list[list]:
        return [list(r) for r in self.blocks.get(k, ())]

    def rank(self, k: int) -> int:
        return len(self.blocks.get(k, ()))


def _freeze(m) -> tuple[tuple, ...]:
    return tuple(tuple(r) for r in m)


@dataclass(frozen=True)
class DegreeIndex:
    rank: int
    matrix: tuple[tuple, ...]
    integral: bool
    factors: tuple[Poly, ...]

    def render(self) -> str:
        return f"rank {self.rank}, frobenius [{', '.join(format_poly(p) for p in self.factors)}]"


@dataclass(frozen=True)
class ConleyIndex:
    """Leray-reduced index: per degree an automorphism and its Frobenius invariant factors."""

    degrees: dict[int, DegreeIndex]

    @classmethod
    def from_matrices(cls, mats: dict[int, Sequence[Sequence]], integral: dict[int, bool] | None = None) -> "ConleyIndex":
        out = {}
        for k in DEGREES:
            m = [list(r) for r in mats.get(k, [])]
            if m and determinant(m) == 0:
                raise ValueError(f"degree {k} matrix is singular")
            flag = integral[k] if integral else all(Fraction(x).denominator == 1 for r in m for x in r)
            out[k] = DegreeIndex(len(m), _freeze(m), flag, tuple(invariant_factors(m)))
        return cls(out)

    def rank(self, k: int) -> int:
        return self.degrees[k].rank if k in self.degrees else 0

    def is_zero(self) -> bool:
        return all(d.rank == 0 for d in self.degrees.values())

    def as_endo(self) -> GradedEndo:
        return GradedEndo({k: d.matrix for k, d in self.degrees.items()})

    def render(self) -> str:
        return "\n".join(f"k={k}: {self.degrees[k].render()}" for k in DEGREES)

    def __str__(self):
        return self.render()


def index_equal(a: ConleyIndex, b: ConleyIndex) -> bool:
    """Equal ranks and equal Frobenius forms in every degree."""
    return all(
        a.rank(k) == b.rank(k) and a.degrees[k].factors == b.degrees[k].factors for k in DEGREES
    )


def index_product(a: ConleyIndex, b: ConleyIndex) -> ConleyIndex:
    """Direct sum, degree by degree."""
    mats, integral = {}, {}
    for k in DEGREES:
        x, y = a.degrees[k].matrix, b.degrees[k].matrix
        n, m = len(x), len(y)
        block = [list(x[i]) + [0] * m for i in range(n)] + [[0] * n + list(y[j]) for j in range(m)]
        mats[k] = block
        integral[k] = a.degrees[k].integral and b.degrees[k].integral
    return ConleyIndex.from_matrices(mats, integral)


def leray_matrix(a: Sequence[Sequence]) -> tuple[list[list], bool]:
    """Restriction of ``A`` to its eventual image ``im A^n`` (Fitting decomposition).

    Returns ``(matrix, integral)``.  A unimodular integer matrix is returned
    unchanged over the integers.
    """
    n = len(a)
    if n == 0:
        return [], True
    ints = all(Fraction(x).denominator == 1 for r in a for x in r)
    det = determinant(a)
    if ints and abs(det) == 1:
        return [[int(x) for x in r] for r in a], True
    if det != 0:
        return [[Fraction(x) for x in r] for r in a], False
    fa = _frac(a)
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(n):
        power = matmul(fa, power)
    cols = rref_columns(power, n)
    if not cols:
        return [], True
    basis = [[power[i][c] for c in cols] for i in range(n)]
    image = matmul(fa, basis)
    reduced_cols = [solve(basis, [image[i][j] for i in range(n)]) for j in range(len(cols))]
    reduced = [[reduced_cols[j][i] for j in range(len(cols))] for i in range(len(cols))]
    if all(x.denominator == 1 for r in reduced for x in r) and abs(determinant(reduced)) == 1:
        return [[int(x) for x in r] for r in reduced], True
    return reduced, False


def leray(e: GradedEndo) -> ConleyIndex:
    mats, integral = {}, {}
    for k in DEGREES:
        mats[k], integral[k] = leray_matrix(e.matrix(k))
    return ConleyIndex.from_matrices(mats, integral)


@dataclass
class IndexComputation:
    pair: WeakIndexPair
    index_map: GradedEndo
    index: ConleyIndex


def index_map(pair: WeakIndexPair, rng=None) -> GradedEndo:
    """``I_P = H*(F_P) ∘ H*(i_P)^{-1}`` on ``H*(P)``."""
    tp = make_tp(pair)
    src = (pair.p1, pair.p2)
    dst = (tp.t1, tp.t2)
    incl = induced_inclusion(src, dst)
    fmap = induced_map(pair.f, src, dst, rng)
    inv = invert_iso(incl)
    composed: GradedMatrix = fmap.compose(inv)
    return GradedEndo({k: _freeze(composed[k]) for k in DEGREES})


def conley_index(f: CombMap, n: CubSet, pair: WeakIndexPair | None = None, limit: int | None = None) -> IndexComputation:
    """Index of ``Inv N``: build a pair, its index map, and reduce."""
    if pair is None:
        pair = build_pair(f, n, limit)
    endo = index_map(pair)
    return IndexComputation(pair, endo, leray(endo))
