"""Exact rational linear algebra over canonical-graph bases.

Matrices are lists of rows of Fractions.  Elimination is fraction-free in
the Bareiss style on a cleared-denominator copy, so all pivots stay integral;
results are converted back to Fractions.  On top of this the module computes
the geometric, Ito and nice subspaces of the 54-dimensional symbol space and
checks every printed dimension.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .algebra import LinComb, inner
from .morphisms import p_ito, phi_hat_geo, tau_c, tau_star
from .symbols import covariant_symbols, flat_symbols, full_basis


# -- fraction-free elimination -------------------------------------------------

def _clear_rows(mat):
    """Scale each row to integers (row-wise lcm of denominators)."""
    out = []
    for row in mat:
        denom = 1
        for x in row:
            f = Fraction(x)
            denom = denom * f.denominator // gcd(denom, f.denominator)
        out.append([int(Fraction(x) * denom) for x in row])
    return out


def rref(mat):
    """Reduced row echelon form (exact); returns (rows, pivot columns).

    Elimination runs fraction-free (Bareiss) on an integer copy; the final
    normalisation divides each pivot row by its pivot.
    """
    if not mat:
        return [], []
    rows = _clear_rows(mat)
    n, m = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(n):
            if i == r or rows[i][c] == 0:
                continue
            rows[i] = [rows[r][c] * rows[i][j] - rows[i][c] * rows[r][j]
                       for j in range(m)]
            g = 0
            for x in rows[i]:
                g = gcd(g, abs(x))
            if g > 1:
                rows[i] = [x // g for x in rows[i]]
        pivots.append(c)
        r += 1
        if r == n:
            break
    out = []
    for i, c in enumerate(pivots):
        out.append([Fraction(x, rows[i][c]) for x in rows[i]])
    return out, pivots


def rank(mat):
    return len(rref(mat)[0])


def kernel(mat):
    """Basis of the right kernel, as coordinate vectors."""
    if not mat:
        return []
    m = len(mat[0])
    rows, pivots = rref(mat)
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * m
        vec[f] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -rows[i][f]
        basis.append(vec)
    return basis


def image(mat):
    """Basis of the column space, as coordinate vectors in the codomain."""
    if not mat:
        return []
    cols = list(map(list, zip(*mat)))
    rows, _ = rref(cols)
    return rows


def row_space(vectors):
    """Canonical (RREF) basis of the span of the given coordinate vectors."""
    rows, _ = rref(vectors)
    return rows


def intersect(u_vectors, v_vectors):
    """Basis of span(u) intersect span(v) via kernel of the stacked matrix."""
    if not u_vectors or not v_vectors:
        return []
    m = len(u_vectors[0])
    cols = [list(u) for u in u_vectors] + [[-x for x in v] for v in v_vectors]
    mat = list(map(list, zip(*cols)))
    combos = kernel(mat)
    out = []
    for combo in combos:
        vec = [Fraction(0)] * m
        for coef, u in zip(combo[:len(u_vectors)], u_vectors):
            for j in range(m):
                vec[j] += coef * u[j]
        out.append(vec)
    return row_space([v for v in out if any(v)])


def subspace_sum(u_vectors, v_vectors):
    return row_space(list(u_vectors) + list(v_vectors))


def contains(space_vectors, vec):
    return rank(list(space_vectors) + [vec]) == rank(list(space_vectors))


class GraphLinearMap:
    """A linear map between spans of canonical graphs, stored column-wise.

    The codomain basis is assembled lazily from the graphs appearing in the
    images.
    """

    def __init__(self, domain_basis, images):
        if len(domain_basis) != len(images):
            raise ValueError("one image per domain vector")
        self.domain_basis = list(domain_basis)
        codomain = {}
        for img in images:
            for g in img.terms:
                codomain.setdefault(g.canonical_key(), g)
        self.codomain_basis = [codomain[k] for k in sorted(codomain)]
        index = {g.canonical_key(): i for i, g in enumerate(self.codomain_basis)}
        self.matrix = [[Fraction(0)] * len(domain_basis)
                       for _ in self.codomain_basis]
        for j, img in enumerate(images):
            for g, c in img.terms.items():
                self.matrix[index[g.canonical_key()]][j] = c

    def rank(self):
        return rank(self.matrix) if self.matrix else 0

    def kernel(self):
        if not self.matrix:
            n = len(self.domain_basis)
            return [[Fraction(1 if i == j else 0) for j in range(n)]
                    for i in range(n)]
        return kernel(self.matrix)

    def image(self):
        return image(self.matrix)


# -- the named subspaces -------------------------------------------------------

def _coords(a: LinComb):
    basis = full_basis()
    index = {g.canonical_key(): i for i, g in enumerate(basis)}
    vec = [Fraction(0)] * len(basis)
    for g, c in a.terms.items():
        vec[index[g.canonical_key()]] = c
    return vec


def from_coords(vec) -> LinComb:
    out = LinComb()
    for g, c in zip(full_basis(), vec):
        if c:
            out = out + LinComb.of(g, c)
    return out


@lru_cache(maxsize=None)
def s_geo():
    """Kernel of phi_hat_geo on the 54-dim symbol span (dimension 15)."""
    basis = full_basis()
    images = [phi_hat_geo(LinComb.of(g)) for g in basis]
    lmap = GraphLinearMap(list(basis), images)
    return tuple(tuple(v) for v in row_space(lmap.kernel()))


@lru_cache(maxsize=None)
def s_ito():
    """Fixed space of the Ito projection on the symbol span (dimension 19)."""
    basis = full_basis()
    mat = []
    cols = [_coords(p_ito(LinComb.of(g))) for g in basis]
    n = len(basis)
    for i in range(n):
        mat.append([cols[j][i] - (1 if i == j else 0) for j in range(n)])
    return tuple(tuple(v) for v in row_space(kernel(mat)))


@lru_cache(maxsize=None)
def nice_functionals():
    """The three pairing functionals annihilating the nice subspace.

    These are the pairings of the only two symbols containing neither a
    once-derived noise factor nor an underived Christoffel factor: the
    all-noise star (one pairing class) and the Christoffel root with two
    thick and two thin noise children (two pairing classes).
    """
    from .symbols import GAMMA, NOISE

    out = []
    for s in full_basis():
        names = [t.name for t in s.types]
        ok = True
        for v, t in enumerate(s.types):
            stars = s.star_degree(v)
            if t.name == NOISE.name and stars == 1:
                ok = False
            if t.name == GAMMA.name and stars == 0:
                ok = False
        if ok:
            out.append(s)
    return tuple(out)


@lru_cache(maxsize=None)
def s_nice():
    """Orthogonal complement of the three pairing functionals (dimension 51)."""
    mat = []
    for f in nice_functionals():
        F = LinComb.of(f)
        mat.append([inner(F, LinComb.of(g)) for g in full_basis()])
    return tuple(tuple(v) for v in row_space(kernel(mat)))


@lru_cache(maxsize=None)
def v_space():
    """Span of the 14 triple covariant derivative vectors."""
    vecs = [_coords(v) for v in covariant_symbols()[:14]]
    return tuple(tuple(v) for v in row_space(vecs))


def dimension_report():
    """Every checkable dimension claim, as (name, expected, got) rows."""
    geo, ito, nice = s_geo(), s_ito(), s_nice()
    both = subspace_sum(geo, ito)
    inter = intersect(geo, ito)
    geo_nice = intersect(geo, nice)
    ito_nice = intersect(ito, nice)
    nice_inter = intersect(geo_nice, ito_nice)
    v_nice = intersect(v_space(), nice)
    rows = [
        ("dim_S", 54, len(full_basis())),
        ("dim_S2", 2, sum(1 for s in full_basis()
                          if sum(t.name == "Xi" for t in s.types) == 2)),
        ("dim_S4", 52, sum(1 for s in full_basis()
                           if sum(t.name == "Xi" for t in s.types) == 4)),
        ("dim_S_geo", 15, len(geo)),
        ("dim_S_ito", 19, len(ito)),
        ("dim_S_geo_plus_S_ito", 32, len(both)),
        ("dim_S_geo_cap_S_ito", 2, len(inter)),
        ("tau_star_in_intersection", 1,
         int(contains(inter, _coords(tau_star())))),
        ("tau_c_in_intersection", 1, int(contains(inter, _coords(tau_c())))),
        ("dim_S_nice", 51, len(nice)),
        ("dim_S_geo_nice", 13, len(geo_nice)),
        ("dim_S_ito_nice_cap_S_geo_nice", 1, len(nice_inter)),
        ("nice_intersection_spanned_by_tau_star", 1,
         int(len(nice_inter) == 1 and contains(nice_inter, _coords(tau_star())))),
        ("dim_V_nice", 12, len(v_nice)),
        ("covariant_15_span_S_geo", 1,
         int(rank([_coords(v) for v in covariant_symbols()]) == len(geo)
             and all(contains(geo, _coords(v)) for v in covariant_symbols()))),
    ]
    return rows


def verify_functionals():
    """Orthogonality and independence claims; (claim, expected, got) rows."""
    geo, ito = s_geo(), s_ito()
    basis = full_basis()
    flats = flat_symbols()

    def pairing_vec(comb: LinComb):
        return [inner(comb, LinComb.of(g)) for g in basis]

    # the star pairing annihilates the Ito space
    star = _nice_star_symbol()
    star_vec = pairing_vec(LinComb.of(star))
    ito_perp = all(sum(c * v for c, v in zip(star_vec, w)) == 0 for w in ito)

    # (1/2) star - mixed - (1/2) same-slot pairing annihilates the geo space
    same, mixed = _gamma_root_pairings()
    combo = (Fraction(1, 2) * LinComb.of(star) - LinComb.of(mixed)
             - Fraction(1, 2) * LinComb.of(same))
    combo_vec = pairing_vec(combo)
    geo_perp = all(sum(c * v for c, v in zip(combo_vec, w)) == 0 for w in geo)

    # the flat pairings plus five curvature functionals have rank 15 over S_geo
    functionals = [pairing_vec(LinComb.of(s)) for s in flats]
    functionals += [pairing_vec(v) for v in _extra_geo_functionals()]
    gram = [[sum(f[i] * w[i] for i in range(54)) for w in geo]
            for f in functionals]
    rk = rank(gram)

    rows = [
        ("star_pairing_perp_S_ito", 1, int(ito_perp)),
        ("geo_orthogonal_combination", 1, int(geo_perp)),
        ("geo_functionals_rank", 15, rk),
    ]
    return rows


@lru_cache(maxsize=None)
def _nice_star_symbol():
    """The pairing class of the all-noise star (norm squared 2)."""
    from .symbols import NOISE

    for s in nice_functionals():
        if all(t.name == NOISE.name for t in s.types):
            return s
    raise RuntimeError("star pairing not found")


@lru_cache(maxsize=None)
def _gamma_root_pairings():
    """The two pairing classes of the Christoffel-rooted nice symbol.

    Returns (same_slot, mixed): the class pairing the thick children together
    (norm squared 4) and the mixed class (norm squared 2).
    """
    gamma_rooted = [s for s in nice_functionals()
                    if any(t.name == "Gamma" for t in s.types)]
    same = next(s for s in gamma_rooted if s.aut_count() == 4)
    mixed = next(s for s in gamma_rooted if s.aut_count() == 2)
    return same, mixed


def _extra_geo_functionals():
    """Five pairing functionals completing the flat ones to rank 15 on S_geo.

    Four single symbols pinned by their coefficients inside the two curvature
    expansions used in the dimension-count argument, plus the thick-thick
    pairing of the Christoffel-rooted nice symbol.  Their span agrees with
    the span of the five non-flat members of the printed functional list.
    """
    from .morphisms import expand_word

    same, _ = _gamma_root_pairings()
    w_mixed = expand_word(("R", "a1", ("nabla", "b1", "a2"), "b2"))
    w_outer = expand_word(("R", "a1", ("nabla", "b1", "b2"), "a2"))
    half = Fraction(1, 2)
    eabisc1 = next(g for g, c in w_mixed.terms.items() if c == half)
    eac1 = next(g for g, c in w_mixed.terms.items() if c == -half)
    eac2 = next(g for g, c in w_outer.terms.items() if c == -half)
    # the pairing of the one-Christoffel tree seen by the covariant derivative
    # of a curvature vector but not by the curvature of a covariant derivative
    inner_cov = expand_word(("nabla", "a1", ("R", "b1", "a2", "b2")))
    outer_cov = expand_word(("nabla", ("R", "a1", "b1", "b2"), "a2"))
    seen = {g.canonical_key() for g in inner_cov.terms}
    ca2 = next(g for g in outer_cov.terms
               if g.canonical_key() not in seen and g.aut_count() == 2
               and sum(t.name == "Gamma" for t in g.types) == 1)
    return [LinComb.of(s) for s in (same, eabisc1, eac1, eac2, ca2)]
