import pytest

from gshe.algebra import act_graph
from gshe.checks import _brute_aut
from gshe.graphs import (GeneratorType, ParseError, PairingError,
                         StructureError, XGraph, empty_graph, format_graph,
                         parse_graph)
from gshe.randgraphs import random_graph
from gshe.symbols import GAMMA, GENERATORS, NOISE


def test_empty_graph_is_unit():
    g = empty_graph()
    c, aut = g.canonicalize()
    assert c.degree == (0, 0)
    assert aut == 1


def test_single_noise_aut():
    g = XGraph(1, 0, (NOISE,), {(0, 1): ("u", 1)})
    assert g.aut_count() == 1


def test_wiring_validation():
    with pytest.raises(StructureError):
        XGraph(1, 0, (NOISE,), {(0, 1): ("u", 2)})
    with pytest.raises(StructureError):
        XGraph(1, 1, (NOISE,), {(0, 1): ("u", 1), ("l", 1): ("u", 1)})
    with pytest.raises(StructureError):
        XGraph(1, 0, (GAMMA,), {(0, 1): ("u", 1)})  # natives unfilled
    with pytest.raises(PairingError):
        XGraph(1, 0, (NOISE,), {(0, 1): ("u", 1)}, [(0, 0)])


def test_gamma_slot_symmetry_cherry():
    # the two slot assignments of the symmetric generator are identified
    base = {(0, 1): ("u", 1), (1, 1): (0, 1), (2, 1): (0, 2)}
    swapped = {(0, 1): ("u", 1), (1, 1): (0, 2), (2, 1): (0, 1)}
    g1 = XGraph(1, 0, (GAMMA, NOISE, NOISE), base)
    g2 = XGraph(1, 0, (GAMMA, NOISE, NOISE), swapped)
    assert g1 == g2
    assert g1.aut_count() == 2


def test_canonical_invariant_under_relabeling(rng, spde_gens):
    for _ in range(80):
        g = random_graph(rng, spde_gens, max_vertices=5,
                         pair_noises=rng.random() < 0.5)
        perm = list(range(g.n_vertices))
        rng.shuffle(perm)
        wiring = {}
        for src, dst in g.wiring.items():
            s = src if src[0] == "l" else (perm[src[0]], src[1])
            d = dst if dst[0] == "u" else (perm[dst[0]], dst[1])
            wiring[s] = d
        types = [None] * g.n_vertices
        for v, t in enumerate(g.types):
            types[perm[v]] = t
        pairing = [frozenset(perm[v] for v in p) for p in g.pairing]
        h = XGraph(g.u, g.l, types, wiring, pairing)
        assert g == h
        assert g.aut_count() == h.aut_count()


def test_canonicalize_idempotent(rng, spde_gens):
    for _ in range(60):
        g = random_graph(rng, spde_gens, max_vertices=5)
        c, _ = g.canonicalize()
        c2, _ = c.canonicalize()
        assert c2.canonical_key() == c.canonical_key()


def test_aut_count_brute_force(rng, spde_gens):
    for _ in range(60):
        g = random_graph(rng, spde_gens, max_vertices=4,
                         pair_noises=rng.random() < 0.5)
        assert _brute_aut(g) == g.aut_count()


def test_external_labels_pin_vertices(rng, spde_gens):
    # relabeling an external slot produces a different canonical class
    g = XGraph(2, 0, (NOISE, NOISE),
               {(0, 1): ("u", 1), (1, 1): ("u", 2)})
    assert g.aut_count() == 1
    swapped = act_graph(((2, 1), ()), g)
    assert swapped == g  # both noises identical, swap is an isomorphism


def test_serialization_roundtrip(rng, spde_gens):
    for _ in range(40):
        g = random_graph(rng, spde_gens, max_vertices=5,
                         pair_noises=rng.random() < 0.5)
        text = format_graph(g)
        h = parse_graph(text, GENERATORS)
        assert h == g
        assert format_graph(h.canonicalize()[0]) \
            == format_graph(g.canonicalize()[0])


def test_parse_error_line_numbers():
    text = "xgraph u=1 l=0\nv 0 Xi\ne 0.out:1 -> up:2\n"
    with pytest.raises(ParseError):
        parse_graph(text, GENERATORS)
    with pytest.raises(ParseError) as exc:
        parse_graph("xgraph u=1 l=0\nv 0 Bogus\n", GENERATORS)
    assert "line 2" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        parse_graph("xgraph u=1 l=0\nv 0 Xi\nbogus directive\n", GENERATORS)
    assert "line 3" in str(exc.value)


def test_perm_closure_validates():
    with pytest.raises(ValueError):
        GeneratorType("bad", 2, 1, in_sym=((1, 1),))
