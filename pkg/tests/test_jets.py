import itertools
import random
from fractions import Fraction

import pytest

from gshe.algebra import LinComb, act, derive, product, trace
from gshe.jets import (InversionError, Jet, TensorJet, Valuation,
                       curvature_counterterm, covariant_vector_derivative,
                       gradient_counterterm, inverse_metric, jet_inv_sqrt,
                       levi_civita, matrix_inverse, nabla_inverse_metric,
                       random_gamma, random_jet, random_vector_field,
                       riemann, scalar_curvature_gradient, sphere_frame,
                       tensors_agree, vector_jet, zero_jet, _mat_mul)
from gshe.morphisms import tau_c, tau_star
from gshe.randgraphs import random_graph, random_permutation
from gshe.subspaces import from_coords, intersect, s_geo, s_nice
from gshe.symbols import GAMMA, labeled_noise


def test_jet_arithmetic():
    x = Jet.coordinate(2, 3, 0)
    y = Jet.coordinate(2, 3, 1)
    assert (x * x).coeffs == {(2, 0): Fraction(1)}
    assert (x * y + y * x).coeffs == {(1, 1): Fraction(2)}
    c = Jet.constant(2, 3, 5)
    assert not c.partial(0)
    assert (x * x * x * x).coeffs == {}  # truncated beyond order 3
    assert x.partial(0).value() == 1


def test_jet_inv_sqrt():
    d, order = 2, 5
    u = Fraction(1, 3) * Jet.coordinate(d, order, 0) \
        + Fraction(1, 2) * (Jet.coordinate(d, order, 1)
                            * Jet.coordinate(d, order, 1))
    j = Jet.constant(d, order, 1) + u
    s = jet_inv_sqrt(j)
    # s^2 * j = 1 up to the truncation order
    prod = s * s * j
    assert prod == Jet.constant(d, order, 1)


def test_matrix_inverse_multiply_back(rng):
    d, order = 2, 4
    for _ in range(10):
        mat = [[random_jet(rng, d, order) for _ in range(d)]
               for _ in range(d)]
        for i in range(d):
            mat[i][i] = mat[i][i] + Jet.constant(d, order, 6)
        inv = matrix_inverse(mat)
        prod = _mat_mul(mat, inv)
        for i in range(d):
            for j in range(d):
                assert prod[i][j] == Jet.constant(d, order,
                                                  1 if i == j else 0)


def test_matrix_inverse_singular():
    d, order = 2, 3
    zero = [[zero_jet(d, order) for _ in range(d)] for _ in range(d)]
    with pytest.raises(InversionError):
        matrix_inverse(zero)


def test_tensor_axioms(rng):
    from gshe.algebra import block_perm, identity_perm, swap_perm

    d, order = 2, 4

    def rand_tensor(u, l):
        return TensorJet(u, l, d, order,
                         {k: random_jet(rng, d, order)
                          for k in itertools.product(range(d), repeat=u + l)})

    for _ in range(15):
        A, B = rand_tensor(1, 1), rand_tensor(1, 1)
        S = swap_perm(1, 1, 1, 1)
        assert tensors_agree(B.product(A), A.product(B).act(S))
        assert tensors_agree(A.product(B).trace(), A.product(B.trace()))
        dd = A.derive().derive()
        S11 = (identity_perm(1), block_perm((2, 1), identity_perm(1)))
        assert tensors_agree(dd, dd.act(S11))
        assert tensors_agree(A.trace().derive(), A.derive().trace())
        C = rand_tensor(2, 2)
        S2 = (block_perm(identity_perm(0), (2, 1)),
              block_perm(identity_perm(0), (2, 1)))
        assert tensors_agree(C.trace().trace(), C.act(S2).trace().trace())


def test_upsilon_morphism(rng):
    d, order = 2, 5
    gamma = random_gamma(rng, d, order)
    val = Valuation(gamma, [random_vector_field(rng, d, order)
                            for _ in range(2)])
    lgens = [labeled_noise(1), labeled_noise(2), GAMMA]
    for _ in range(25):
        a = random_graph(rng, lgens, max_vertices=3, max_low=2)
        b = random_graph(rng, lgens, max_vertices=2, max_low=1)
        A, B = val.evaluate_graph(a), val.evaluate_graph(b)
        assert tensors_agree(val(product(LinComb.of(a), LinComb.of(b))),
                             A.product(B))
        assert tensors_agree(val(derive(LinComb.of(a))), A.derive())
        if a.u >= 1 and a.l >= 1:
            assert tensors_agree(val(trace(LinComb.of(a))), A.trace())
        pu = random_permutation(rng, a.u)
        pl = random_permutation(rng, a.l)
        assert tensors_agree(val(act((pu, pl), LinComb.of(a))),
                             A.act((pu, pl)))


def test_upsilon_zero_gamma_kills_gamma_graphs(rng):
    d, order = 2, 4
    gamma0 = TensorJet(1, 2, d, order, {})
    val = Valuation(gamma0, [random_vector_field(rng, d, order)
                             for _ in range(2)])
    cherry = next(s for s in __import__("gshe.symbols",
                                        fromlist=["full_basis"]).full_basis()
                  if any(t.name == GAMMA.name for t in s.types))
    out = val(cherry)
    assert all(not j for j in out.comps.values())


def test_upsilon_thick_cherry_value(rng):
    # the two-noise Christoffel cherry evaluates to 2 Gamma(sigma_i, sigma_j)
    from gshe.symbols import full_basis

    d, order = 2, 4
    gamma = random_gamma(rng, d, order)
    sig = [random_vector_field(rng, d, order) for _ in range(2)]
    val = Valuation(gamma, sig)
    cherry = next(s for s in full_basis()
                  if any(t.name == GAMMA.name for t in s.types)
                  and sum(t.name == "Xi" for t in s.types) == 2)
    got = val(cherry)
    expect = {}
    for a in range(d):
        j = zero_jet(d, order)
        for i in range(2):
            for b in range(d):
                for c in range(d):
                    j = j + 2 * gamma.comp((b, c, a)) * sig[i].comp((b,)) \
                        * sig[i].comp((c,))
        expect[(a,)] = j
    assert tensors_agree(got, TensorJet(1, 0, d, order, expect))


def test_counterterm_identities():
    # quick regression at d = 2; the acceptance gate runs all five seeds
    # including d = 3
    for seed in (11, 13):
        rng = random.Random(seed)
        d = 2 if seed % 2 else 3
        m = 2 if seed % 3 else 3
        gamma = random_gamma(rng, d, 5)
        sig = [random_vector_field(rng, d, 5) for _ in range(m)]
        val = Valuation(gamma, sig)
        v1, v2 = val(tau_star()), val(tau_c())
        e1 = curvature_counterterm(gamma, sig)
        e2 = gradient_counterterm(gamma, sig)
        assert all(v1.value((a,)) == e1.value((a,)) for a in range(d)), seed
        assert all(v2.value((a,)) == e2.value((a,)) for a in range(d)), seed


def test_levi_civita_metric_compatibility(rng):
    d, order = 2, 6
    sig = [random_vector_field(rng, d, order) for _ in range(d)]
    sig[0] = sig[0] + vector_jet(d, order, [Jet.constant(d, order, 5),
                                            zero_jet(d, order)])
    sig[1] = sig[1] + vector_jet(d, order, [zero_jet(d, order),
                                            Jet.constant(d, order, 5)])
    gamma = levi_civita(sig)
    ng = nabla_inverse_metric(gamma, inverse_metric(sig))
    for k in ng.comps:
        assert not ng.comp(k).truncate(order - 3)


def test_levi_civita_kills_tau_star(rng):
    d, order = 2, 6
    sig = [random_vector_field(rng, d, order) for _ in range(d)]
    sig[0] = sig[0] + vector_jet(d, order, [Jet.constant(d, order, 4),
                                            zero_jet(d, order)])
    sig[1] = sig[1] + vector_jet(d, order, [zero_jet(d, order),
                                            Jet.constant(d, order, 4)])
    gamma = levi_civita(sig)
    val = Valuation(gamma, sig)
    v = val(tau_star())
    assert all(v.value((a,)) == 0 for a in range(d))


def test_tau_c_gradient_ratio_reported(rng, capsys):
    """In the Levi-Civita case tau_c evaluates to a multiple of grad R.

    The proportionality constant is determined by direct evaluation rather
    than asserted from any printed value; the run reports it and checks it
    is consistent across components and seeds.
    """
    ratios = set()
    for seed in (3, 4):
        rr = random.Random(seed)
        d, order = 2, 6
        sig = [random_vector_field(rr, d, order) for _ in range(d)]
        sig[0] = sig[0] + vector_jet(d, order, [Jet.constant(d, order, 5),
                                                zero_jet(d, order)])
        sig[1] = sig[1] + vector_jet(d, order, [zero_jet(d, order),
                                                Jet.constant(d, order, 5)])
        gamma = levi_civita(sig)
        val = Valuation(gamma, sig)
        vc = val(tau_c())
        grad = scalar_curvature_gradient(gamma, sig)
        for a in range(d):
            gv = grad.value((a,))
            if gv:
                ratios.add(vc.value((a,)) / gv)
    assert len(ratios) == 1
    ratio = next(iter(ratios))
    print(f"tau_c / grad(scalar curvature) in the Levi-Civita case: {ratio}")
    assert ratio != 0


def test_riemann_antisymmetry(rng):
    d = 2
    gamma = random_gamma(rng, d, 4)
    riem = riemann(gamma)
    for b in range(d):
        for c in range(d):
            for e in range(d):
                for a in range(d):
                    assert riem.comp((b, c, e, a)) \
                        == -1 * riem.comp((c, b, e, a))


def test_riemann_matches_defining_identity(rng):
    # evaluate nabla_X nabla_Y Z - nabla_Y nabla_X Z on coordinate fields
    d, order = 2, 5
    gamma = random_gamma(rng, d, order)
    riem = riemann(gamma)
    for b in range(d):
        for c in range(d):
            eb = vector_jet(d, order, [Jet.constant(d, order,
                                                    1 if i == b else 0)
                                       for i in range(d)])
            ec = vector_jet(d, order, [Jet.constant(d, order,
                                                    1 if i == c else 0)
                                       for i in range(d)])
            for e in range(d):
                ee = vector_jet(d, order, [Jet.constant(d, order,
                                                        1 if i == e else 0)
                                           for i in range(d)])
                lhs = covariant_vector_derivative(
                    gamma, eb, covariant_vector_derivative(gamma, ec, ee)) \
                    - covariant_vector_derivative(
                        gamma, ec, covariant_vector_derivative(gamma, eb, ee))
                for a in range(d):
                    assert lhs.value((a,)) == riem.value((b, c, e, a))


def test_sphere_frame_identities():
    sigmas, gamma = sphere_frame((1, 0, 0), order=4)
    d = 3
    g0 = inverse_metric(sigmas)
    for a in range(d):
        for b in range(d):
            expect = Fraction(1 if a == b else 0) \
                - Fraction(1 if a == 0 and b == 0 else 0)
            assert g0.value((a, b)) == expect
    total = None
    for s in sigmas:
        t = covariant_vector_derivative(gamma, s, s)
        total = t if total is None else total + t
    assert all(total.value((a,)) == 0 for a in range(d))
    for i in range(d):
        assert sigmas[i].value((0,)) == 0  # tangent at (1,0,0)


def test_sphere_frame_rejects_off_sphere():
    with pytest.raises(ValueError):
        sphere_frame((1, 1, 0))


def test_nice_geo_vanishing(rng):
    d, m, order = 2, 2, 5
    gamma0 = TensorJet(1, 2, d, order, {})
    sigs = []
    for _ in range(m):
        comps = []
        for _ in range(d):
            cf = {k: Fraction(rng.randint(-2, 2), rng.randint(1, 2))
                  for k in [(0, 0), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1)]}
            comps.append(Jet(d, order, cf))
        sigs.append(vector_jet(d, order, comps))
    val = Valuation(gamma0, sigs)
    for vec in intersect(s_geo(), s_nice()):
        tv = val(from_coords(vec))
        assert all(tv.value((a,)) == 0 for a in range(d))


def test_jet_serialization_roundtrip(rng):
    j = random_jet(rng, 3, 3)
    from gshe.jets import format_jet, parse_jet

    text = format_jet(j)
    assert parse_jet(text) == j
    assert format_jet(parse_jet(text)) == text


def test_upsilon_displayed_example(rng):
    """The once-derived Christoffel tree with a grafted noise pair.

    Value: 2 d_eta Gamma^a_{b,c} sigma_j^eta sigma_i^c d_z sigma_i^b sigma_j^z.
    """
    from gshe.graphs import XGraph
    from gshe.symbols import labeled_noise

    d, order = 2, 5
    gamma = random_gamma(rng, d, order)
    sig = [random_vector_field(rng, d, order) for _ in range(2)]
    val = Valuation(gamma, sig)
    xi_i, xi_j = labeled_noise(1), labeled_noise(2)
    g = XGraph(1, 0, (GAMMA, xi_j, xi_i, xi_i, xi_j),
               {(0, 1): ("u", 1),    # Gamma root
                (1, 1): (0, 0),      # sigma_j into the Christoffel star slot
                (2, 1): (0, 2),      # sigma_i into the second native slot
                (3, 1): (0, 1),      # derived sigma_i into the first native
                (4, 1): (3, 0)})     # sigma_j grafted onto that sigma_i
    got = val.evaluate_graph(g)
    si, sj = sig[0], sig[1]
    for a in range(d):
        expect = zero_jet(d, order)
        for b in range(d):
            for c in range(d):
                for eta in range(d):
                    for z in range(d):
                        expect = expect + 2 * gamma.comp((b, c, a)).partial(eta) \
                            * sj.comp((eta,)) * si.comp((c,)) \
                            * si.comp((b,)).partial(z) * sj.comp((z,))
        assert got.value((a,)) == expect.value()


def test_in_symbol_span():
    from gshe.morphisms import in_symbol_span, phi_hat_geo
    from gshe.symbols import full_basis

    basis = full_basis()
    span = LinComb.of(basis[0]) + 2 * LinComb.of(basis[40])
    assert in_symbol_span(span)
    assert in_symbol_span(phi_hat_geo(span))
    # a product with a closed loop component is outside the span
    from gshe.algebra import product
    from gshe.graphs import XGraph
    from gshe.symbols import NOISE

    loop = XGraph(0, 0, (NOISE, NOISE), {(0, 1): (1, 0), (1, 1): (0, 0)},
                  [(0, 1)])
    double = product(LinComb.of(basis[1]), LinComb.of(loop))
    assert double.degree() == (1, 0)
    assert not in_symbol_span(double)
    # and the degree check rejects products of two root symbols
    assert not in_symbol_span(product(LinComb.of(basis[1]),
                                      LinComb.of(basis[1])))
