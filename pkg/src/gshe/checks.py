"""Seeded property suites shared by the CLI and the acceptance tests.

Each suite returns a list of (claim, cases, failures) triples; a suite
passes when every failure count is zero.  The suites mirror the axioms:
the four defining operations and their coherence identities, the adjoint
pairs, the pre-Lie law, the projection identities, the representation
roundtrip, and the orbit-stabiliser bookkeeping of the paired symbols.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .algebra import (LinComb, act, block_perm, coproduct, decompose, derive,
                      derive_adjoint, graft, identity_perm, inner, product,
                      rebuild, swap_perm, tensor_inner, trace, trace_adjoint)
from .graphs import XGraph
from .morphisms import M_ito, lie_bracket, p_ito, phi_geo
from .randgraphs import (random_graph, random_lincomb, random_permutation)
from .symbols import (GAMMA, NOISE, full_basis, pairing_orbit_count,
                      symmetry_factor, unpaired_symmetry_factor)

GENS = [NOISE, GAMMA]


def _brute_aut(g: XGraph) -> int:
    n = g.n_vertices
    count = 0
    groups = [g.types[v].slot_group for v in range(n)]
    for perm in itertools.permutations(range(n)):
        if any(g.types[v].name != g.types[perm[v]].name for v in range(n)):
            continue
        for choice in itertools.product(*groups):
            wiring = {}
            for src, dst in g.wiring.items():
                s = src if src[0] == "l" else (perm[src[0]],
                                               choice[src[0]][1][src[1] - 1])
                if dst[0] == "u":
                    d = dst
                elif dst[1] == 0:
                    d = (perm[dst[0]], 0)
                else:
                    d = (perm[dst[0]], choice[dst[0]][0][dst[1] - 1])
                wiring[s] = d
            pair2 = frozenset(frozenset(perm[v] for v in p) for p in g.pairing)
            if wiring == g.wiring and pair2 == g.pairing:
                count += 1
    return count


def suite_talgebra(seed=0, cases=500):
    rng = random.Random(seed)
    rows = {name: [0, 0] for name in
            ("multperm_swap", "multperm_concat", "assoc_unit", "trperm",
             "trcomm", "trtensor", "d2_first", "d2_symmetric", "leibniz",
             "dtr", "prelie_formula", "prelie_symmetry", "canonical_idem",
             "aut_bruteforce")}

    def tally(name, ok):
        if rows[name][0] < cases:
            rows[name][0] += 1
            rows[name][1] += 0 if ok else 1

    def need(name):
        return rows[name][0] < cases

    from .algebra import unit

    one = unit()
    guard = 0
    while any(rows[n][0] < cases for n in rows) and guard < 60 * cases:
        guard += 1
        want_traced = need("trcomm") or need("trperm") or need("dtr")
        a = random_graph(rng, GENS, max_vertices=3,
                         min_u=2 if want_traced else 0,
                         min_low=2 if want_traced else 0, max_low=3)
        b = random_graph(rng, GENS, max_vertices=3)
        A, B = LinComb.of(a), LinComb.of(b)
        S = swap_perm(a.u, a.l, b.u, b.l)
        tally("multperm_swap", product(B, A) == act(S, product(A, B)))
        a1 = (random_permutation(rng, a.u), random_permutation(rng, a.l))
        a2 = (random_permutation(rng, b.u), random_permutation(rng, b.l))
        comb = (block_perm(a1[0], a2[0]), block_perm(a1[1], a2[1]))
        tally("multperm_concat",
              product(act(a1, A), act(a2, B)) == act(comb, product(A, B)))
        tally("assoc_unit", product(one, A) == A and product(A, one) == A
              and product(product(A, B), A) == product(A, product(B, A)))
        dd = derive(derive(A))
        S11 = (identity_perm(a.u), block_perm((2, 1), identity_perm(a.l)))
        tally("d2_symmetric", dd == act(S11, dd))
        al = (random_permutation(rng, a.u), random_permutation(rng, a.l))
        tally("d2_first", derive(act(al, A))
              == act((al[0], block_perm((1,), al[1])), derive(A)))
        SL = (block_perm(identity_perm(a.u), identity_perm(b.u)),
              block_perm(swap_perm(a.u, a.l, 0, 1)[1], identity_perm(b.l)))
        tally("leibniz", derive(product(A, B))
              == product(derive(A), B) + act(SL, product(A, derive(B))))
        if a.u >= 1 and a.l >= 1:
            alp = (random_permutation(rng, a.u - 1),
                   random_permutation(rng, a.l - 1))
            ext = (block_perm(alp[0], (1,)), block_perm(alp[1], (1,)))
            tally("trperm", act(alp, trace(A)) == trace(act(ext, A)))
            tally("dtr", derive(trace(A)) == trace(derive(A)))
            tally("trtensor", trace(product(B, A)) == product(B, trace(A)))
        if a.u >= 2 and a.l >= 2:
            Sv = (block_perm(identity_perm(a.u - 2), (2, 1)),
                  block_perm(identity_perm(a.l - 2), (2, 1)))
            tally("trcomm", trace(trace(A)) == trace(trace(act(Sv, A))))
        g, _ = a.canonicalize()
        tally("canonical_idem", g.canonicalize()[0] == g)
        if need("aut_bruteforce"):
            h = random_graph(rng, GENS, max_vertices=6,
                             pair_noises=(guard % 2 == 0))
            if h.n_vertices <= 6:
                tally("aut_bruteforce", _brute_aut(h) == h.aut_count())
        if need("prelie_formula"):
            A = random_lincomb(rng, GENS, degree=(1, 0), n_terms=2,
                               max_vertices=2)
            B = random_lincomb(rng, GENS, degree=(1, 0), n_terms=2,
                               max_vertices=2)
            C = random_lincomb(rng, GENS, degree=(1, 0), n_terms=1,
                               max_vertices=2)
            assoc_ab = graft(A, graft(B, C)) - graft(graft(A, B), C)
            assoc_ba = graft(B, graft(A, C)) - graft(graft(B, A), C)
            d2c = derive(derive(C))
            rhs = trace(trace(product(product(d2c, A), B)))
            tally("prelie_formula", assoc_ab == rhs)
            tally("prelie_symmetry", assoc_ab == assoc_ba)
    return [(name, c, f) for name, (c, f) in rows.items()]


def suite_adjoint(seed=0, cases=500):
    rng = random.Random(seed)
    rows = {name: [0, 0] for name in
            ("trace_pair", "derive_pair", "product_pair", "act_pair")}

    def tally(name, ok):
        rows[name][0] += 1
        rows[name][1] += 0 if ok else 1

    while min(c for c, _ in rows.values()) < cases:
        a = random_graph(rng, GENS, max_vertices=3)
        b = random_graph(rng, GENS, max_vertices=3)
        A, B = LinComb.of(a), LinComb.of(b)
        if rows["act_pair"][0] < cases and a.degree == b.degree:
            al = (random_permutation(rng, a.u), random_permutation(rng, a.l))
            inv = (tuple(al[0].index(i + 1) + 1 for i in range(a.u)),
                   tuple(al[1].index(i + 1) + 1 for i in range(a.l)))
            tally("act_pair", inner(act(al, A), B) == inner(A, act(inv, B)))
        if rows["trace_pair"][0] < cases and a.u == b.u + 1 and a.l == b.l + 1:
            tally("trace_pair",
                  inner(trace(A), B) == inner(A, trace_adjoint(B)))
        if rows["derive_pair"][0] < cases and a.u == b.u and a.l + 1 == b.l:
            tally("derive_pair",
                  inner(derive(A), B) == inner(A, derive_adjoint(B)))
        if rows["product_pair"][0] < cases:
            h = random_graph(rng, GENS, max_vertices=4)
            if (a.u + b.u, a.l + b.l) == h.degree:
                H = LinComb.of(h)
                tally("product_pair", inner(product(A, B), H)
                      == tensor_inner(coproduct(H), A, B))
    return [(name, c, f) for name, (c, f) in rows.items()]


def suite_identities(seed=0, cases=500):
    rng = random.Random(seed)
    rows = {name: [0, 0] for name in
            ("decompose_roundtrip", "phi_geo_leibniz", "phi_geo_commutes",
             "p_ito_idempotent", "p_ito_self_adjoint", "m_ito_average",
             "jacobi", "orbit_stabiliser")}

    def tally(name, ok):
        rows[name][0] += 1
        rows[name][1] += 0 if ok else 1

    basis = full_basis()
    for s in basis:
        n = pairing_orbit_count(s)
        tally("orbit_stabiliser",
              n * symmetry_factor(s) == unpaired_symmetry_factor(s))
    for it in range(cases):
        g = random_graph(rng, GENS, max_vertices=4,
                         pair_noises=(it % 2 == 0))
        m, alpha, parts = decompose(g)
        tally("decompose_roundtrip",
              rebuild(m, alpha, parts, pairing=g.pairing) == LinComb.of(g))
    for it in range(max(1, cases // 20)):
        a = random_graph(rng, GENS, max_vertices=2)
        b = random_graph(rng, GENS, max_vertices=2)
        A, B = LinComb.of(a), LinComb.of(b)
        tally("phi_geo_leibniz", phi_geo(product(A, B))
              == product(phi_geo(A), B) + product(A, phi_geo(B)))
        ok = phi_geo(derive(A)) == derive(phi_geo(A))
        if a.u >= 1 and a.l >= 1:
            ok = ok and phi_geo(trace(A)) == trace(phi_geo(A))
        tally("phi_geo_commutes", ok)

    def random_span_element(k=3):
        out = LinComb()
        for _ in range(k):
            out = out + LinComb.of(basis[rng.randrange(len(basis))],
                                   Fraction(rng.randint(-3, 3),
                                            rng.randint(1, 3)))
        return out

    for it in range(cases):
        X = random_span_element()
        Y = random_span_element()
        PX = p_ito(X)
        tally("p_ito_idempotent", p_ito(PX) == PX)
        tally("p_ito_self_adjoint", inner(PX, Y) == inner(X, p_ito(Y)))
        MX = M_ito(X)
        tally("m_ito_average", M_ito(MX) == MX)
    for it in range(max(1, cases // 50)):
        A = random_lincomb(rng, GENS, degree=(1, 0), n_terms=1, max_vertices=2)
        B = random_lincomb(rng, GENS, degree=(1, 0), n_terms=1, max_vertices=2)
        C = random_lincomb(rng, GENS, degree=(1, 0), n_terms=1, max_vertices=2)
        jac = (lie_bracket(A, lie_bracket(B, C))
               + lie_bracket(B, lie_bracket(C, A))
               + lie_bracket(C, lie_bracket(A, B)))
        tally("jacobi", not jac)
    return [(name, c, f) for name, (c, f) in rows.items()]


def suite_jets(seed=0, cases=40):
    import itertools as it

    from .jets import (TensorJet, random_gamma, random_jet,
                       random_vector_field, tensors_agree, Valuation)
    from .symbols import labeled_noise

    rng = random.Random(seed)
    d, order = 2, 4
    rows = {name: [0, 0] for name in
            ("tensor_axioms", "upsilon_morphism", "matrix_inverse")}

    def tally(name, ok):
        rows[name][0] += 1
        rows[name][1] += 0 if ok else 1

    def rand_tensor(u, l):
        return TensorJet(u, l, d, order,
                         {k: random_jet(rng, d, order)
                          for k in it.product(range(d), repeat=u + l)})

    for _ in range(cases):
        A, B = rand_tensor(1, 1), rand_tensor(1, 1)
        S = swap_perm(1, 1, 1, 1)
        ok = tensors_agree(B.product(A), A.product(B).act(S))
        ok = ok and tensors_agree(A.product(B).trace(), A.product(B.trace()))
        dd = A.derive().derive()
        S11 = (identity_perm(1), block_perm((2, 1), identity_perm(1)))
        ok = ok and tensors_agree(dd, dd.act(S11))
        ok = ok and tensors_agree(A.trace().derive(), A.derive().trace())
        tally("tensor_axioms", ok)
    gamma = random_gamma(rng, d, order)
    val = Valuation(gamma, [random_vector_field(rng, d, order)
                            for _ in range(2)])
    lgens = [labeled_noise(1), labeled_noise(2), GAMMA]
    for _ in range(cases):
        a = random_graph(rng, lgens, max_vertices=2, max_low=1)
        b = random_graph(rng, lgens, max_vertices=1, max_low=1)
        A, B = val.evaluate_graph(a), val.evaluate_graph(b)
        ok = tensors_agree(val(product(LinComb.of(a), LinComb.of(b))),
                           A.product(B))
        ok = ok and tensors_agree(val(derive(LinComb.of(a))), A.derive())
        if a.u >= 1 and a.l >= 1:
            ok = ok and tensors_agree(val(trace(LinComb.of(a))), A.trace())
        tally("upsilon_morphism", ok)
    from .jets import InversionError, Jet, matrix_inverse, _mat_mul

    for _ in range(cases):
        mat = [[random_jet(rng, d, order) for _ in range(d)] for _ in range(d)]
        for i in range(d):
            mat[i][i] = mat[i][i] + Jet.constant(d, order, 7)
        try:
            inv = matrix_inverse(mat)
        except InversionError:
            continue
        prod = _mat_mul(mat, inv)
        ok = all(prod[i][j] == Jet.constant(d, order, 1 if i == j else 0)
                 for i in range(d) for j in range(d))
        tally("matrix_inverse", ok)
    return [(name, c, f) for name, (c, f) in rows.items()]


SUITES = {
    "talgebra": suite_talgebra,
    "adjoint": suite_adjoint,
    "identities": suite_identities,
    "jets": suite_jets,
}
