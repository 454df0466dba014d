"""Covariant derivative, curvature, the diffeomorphism and pair-merging maps.

``nabla`` and ``curvature`` are built from the grafting product and the
Christoffel generator.  ``phi_geo`` is the infinitesimal action of a
diffeomorphism generator ``h`` on symbols (an infinitesimal morphism fixed by
its values on the generators); its corrected version ``phi_hat_geo`` cuts out
the geometric counterterms as its kernel.  ``m_ito`` merges noise pairs into
a two-output generator, ``M_ito`` averages star edges over each pair, and
``p_ito = p_acyc . M_ito`` is the self-adjoint projection whose fixed space
within the symbol span is the Ito-isometric subspace.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .algebra import (LinComb, generator, graft, product,
                      substitute_vertex, trace)
from .graphs import DegreeError, PairingError, XGraph
from .symbols import DIFF, GAMMA, GPAIR, NOISE, labeled_noise


def in_symbol_span(a: LinComb, allow_h=True) -> bool:
    """Membership test for the span of symbols and their h-decorations.

    Every term must have degree (1,0), at most one h vertex, a perfect noise
    pairing, and be connected as a graph without identifying paired vertices.
    """
    for g in a.terms:
        if g.degree != (1, 0):
            return False
        h_count = sum(1 for t in g.types if t.name == DIFF.name)
        if h_count > (1 if allow_h else 0):
            return False
        noises = {v for v, t in enumerate(g.types) if t.name == NOISE.name}
        if {v for p in g.pairing for v in p} != noises:
            return False
        if not g.is_connected(with_pairing=False):
            return False
    return True


def nabla(a: LinComb, b: LinComb) -> LinComb:
    """Symbolic covariant derivative: a grafted on b plus the Christoffel term."""
    for x in (a, b):
        if x and x.degree() != (1, 0):
            raise DegreeError(f"nabla needs degree (1,0), got {x.degree()}")
    christoffel = trace(trace(product(product(generator(GAMMA), a), b)))
    return graft(a, b) + Fraction(1, 2) * christoffel


def lie_bracket(a: LinComb, b: LinComb) -> LinComb:
    return graft(a, b) - graft(b, a)


def curvature(x: LinComb, y: LinComb, z: LinComb) -> LinComb:
    return (nabla(x, nabla(y, z)) - nabla(y, nabla(x, z))
            - nabla(nabla(x, y) - nabla(y, x), z))


# -- labelled word expansion --------------------------------------------------

def _atom(name):
    return generator(labeled_noise({"a1": 1, "a2": 2, "b1": 3, "b2": 4}[name]))


def expand_labeled(word) -> LinComb:
    """Evaluate a nested word over atoms a1,a2,b1,b2 with labelled noises."""
    if isinstance(word, str):
        return _atom(word)
    op = word[0]
    if op == "nabla":
        return nabla(expand_labeled(word[1]), expand_labeled(word[2]))
    if op == "graft":
        return graft(expand_labeled(word[1]), expand_labeled(word[2]))
    if op == "R":
        return curvature(*(expand_labeled(w) for w in word[1:]))
    if op == "-":
        return expand_labeled(word[1]) - expand_labeled(word[2])
    if op == "scale":
        return Fraction(word[1]) * expand_labeled(word[2])
    raise ValueError(f"unknown word operator {op!r}")


def expand_word(word) -> LinComb:
    """Expand a word and pair the a-atoms together and the b-atoms together."""
    labelled = expand_labeled(word)

    def per_graph(g):
        types = []
        groups = {}
        for v, t in enumerate(g.types):
            if t.name in ("Xi1", "Xi2"):
                groups.setdefault("a", []).append(v)
                types.append(NOISE)
            elif t.name in ("Xi3", "Xi4"):
                groups.setdefault("b", []).append(v)
                types.append(NOISE)
            else:
                types.append(t)
        pairing = [tuple(vs) for vs in groups.values() if len(vs) == 2]
        if sum(len(vs) for vs in groups.values()) != 2 * len(pairing):
            raise PairingError("labelled atoms must occur exactly twice each")
        return LinComb.of(XGraph(g.u, g.l, types, g.wiring, pairing))

    return labelled.map_terms(per_graph)


NABLA_NN_WORD = ("nabla", "a1", "a2")


@lru_cache(maxsize=None)
def tau_star() -> LinComb:
    word = ("-", ("R", "a1", ("nabla", "b1", "a2"), "b2"),
            ("scale", 2, ("R", "a1", ("nabla", "a2", "b1"), "b2")))
    return expand_word(word)


@lru_cache(maxsize=None)
def tau_c() -> LinComb:
    t1 = ("nabla", "a1", ("R", "b1", "a2", "b2"))
    t2 = ("R", ("nabla", "a1", "b1"), "a2", "b2")
    t3 = ("R", "b1", ("nabla", "a1", "a2"), "b2")
    t4 = ("R", "b1", "a2", ("nabla", "a1", "b2"))
    return expand_word(("-", ("-", ("-", t1, t2), t3), t4))


# -- infinitesimal diffeomorphism action --------------------------------------

def _graph(u, l, types, wiring, pairing=()):
    return XGraph(u, l, types, wiring, pairing)


@lru_cache(maxsize=None)
def _image_noise() -> LinComb:
    """[Xi, h] = Xi grafted on h minus h grafted on Xi."""
    t1 = _graph(1, 0, (NOISE, DIFF), {(0, 1): (1, 0), (1, 1): ("u", 1)})
    t2 = _graph(1, 0, (NOISE, DIFF), {(1, 1): (0, 0), (0, 1): ("u", 1)})
    return LinComb.of(t1) - LinComb.of(t2)


@lru_cache(maxsize=None)
def _image_gamma() -> LinComb:
    """Transformation of the Christoffel generator under the h-action."""
    g1 = _graph(1, 2, (GAMMA, DIFF),
                {(0, 1): (1, 0), (1, 1): ("u", 1),
                 ("l", 1): (0, 1), ("l", 2): (0, 2)})
    g2 = _graph(1, 2, (GAMMA, DIFF),
                {(1, 1): (0, 0), (0, 1): ("u", 1),
                 ("l", 1): (0, 1), ("l", 2): (0, 2)})
    g3 = _graph(1, 2, (GAMMA, DIFF),
                {(1, 1): (0, 2), (0, 1): ("u", 1),
                 ("l", 1): (1, 0), ("l", 2): (0, 1)})
    g4 = _graph(1, 2, (GAMMA, DIFF),
                {(1, 1): (0, 2), (0, 1): ("u", 1),
                 ("l", 1): (0, 1), ("l", 2): (1, 0)})
    g5 = _graph(1, 2, (DIFF,),
                {(0, 1): ("u", 1), ("l", 1): (0, 0), ("l", 2): (0, 0)})
    return (LinComb.of(g1) - LinComb.of(g2) - LinComb.of(g3) - LinComb.of(g4)
            - 2 * LinComb.of(g5))


def _noise_carrier(term: XGraph) -> int:
    return next(v for v, t in enumerate(term.types) if t.name == NOISE.name)


def phi_geo(a: LinComb) -> LinComb:
    """Infinitesimal morphism with phi(Xi) = [Xi,h] and the Gamma image above."""
    def per_graph(g):
        out = LinComb()
        for v, t in enumerate(g.types):
            if t.name == NOISE.name:
                out = out + substitute_vertex(g, v, _image_noise(),
                                              carrier=_noise_carrier)
            elif t.name == GAMMA.name:
                out = out + substitute_vertex(g, v, _image_gamma())
            elif t.name == DIFF.name:
                raise ValueError("phi_geo domain excludes h-decorated graphs")
            else:
                raise ValueError(f"phi_geo undefined on generator {t.name!r}")
        return out

    return a.map_terms(per_graph)


def phi_hat_geo(a: LinComb) -> LinComb:
    """phi_geo minus the bracket with the diffeomorphism generator."""
    if not a:
        return a
    if a.degree() != (1, 0):
        raise DegreeError("phi_hat_geo acts on degree-(1,0) elements")
    return phi_geo(a) - lie_bracket(a, generator(DIFF))


# -- pair merging and the Ito projection --------------------------------------

def _noise_pairs(g: XGraph):
    noises = {v for v, t in enumerate(g.types) if t.name == NOISE.name}
    covered = {v for p in g.pairing for v in p if v in noises}
    if covered != noises:
        raise PairingError("every noise vertex must belong to a pair")
    return [tuple(sorted(p)) for p in g.pairing
            if all(v in noises for v in p)]


def m_ito(a: LinComb) -> LinComb:
    """Merge each noise pair into one two-output generator.

    A pair whose members receive k star edges in total contributes a factor
    2^-k; the output is a combination of graphs over {g, Gamma, h}.
    """
    def per_graph(g):
        pairs = sorted(_noise_pairs(g))
        keep = [v for v in range(g.n_vertices)
                if all(v not in p for p in pairs)]
        new_index = {v: i for i, v in enumerate(keep)}
        types = [g.types[v] for v in keep] + [GPAIR] * len(pairs)
        out_map = {}
        star_map = {}
        coeff = Fraction(1)
        for i, (v, w) in enumerate(pairs):
            gp = len(keep) + i
            out_map[(v, 1)] = (gp, 1)
            out_map[(w, 1)] = (gp, 2)
            star_map[v] = star_map[w] = (gp, 0)
            coeff /= 2 ** (g.star_degree(v) + g.star_degree(w))

        wiring = {}
        for src, dst in g.wiring.items():
            ns = src if src[0] == "l" else out_map.get(src) or (new_index[src[0]], src[1])
            if dst[0] == "u":
                nd = dst
            elif dst[1] == 0 and dst[0] in star_map:
                nd = star_map[dst[0]]
            else:
                nd = (new_index[dst[0]], dst[1])
            wiring[ns] = nd
        pairing = [p for p in g.pairing if not any(set(p) == set(q) for q in pairs)]
        return LinComb.of(XGraph(g.u, g.l, types, wiring, pairing), coeff)

    return a.map_terms(per_graph)


def M_ito(a: LinComb) -> LinComb:
    """Average every star edge landing on a noise pair over both members."""
    def per_graph(g):
        pairs = _noise_pairs(g)
        mate = {}
        for v, w in pairs:
            mate[v], mate[w] = w, v
        star_edges = [s for s, d in g.wiring.items()
                      if d[0] != "u" and d[1] == 0 and d[0] in mate]
        out = LinComb()
        weight = Fraction(1, 2 ** len(star_edges))
        for flips in itertools.product((False, True), repeat=len(star_edges)):
            wiring = dict(g.wiring)
            for s, flip in zip(star_edges, flips):
                if flip:
                    wiring[s] = (mate[wiring[s][0]], 0)
            out = out + LinComb.of(
                XGraph(g.u, g.l, g.types, wiring, g.pairing), weight)
        return out

    return a.map_terms(per_graph)


def p_acyc(a: LinComb) -> LinComb:
    """Drop terms whose pair-merged directed graph contains a cycle."""
    out = LinComb()
    for g, c in a.terms.items():
        if not g.has_directed_cycle(merge_pairs=True):
            out = out + LinComb.of(g, c)
    return out


def p_ito(a: LinComb) -> LinComb:
    return p_acyc(M_ito(a))


@lru_cache(maxsize=None)
def _pair_image() -> LinComb:
    """The paired two-noise element replacing a merged generator."""
    g = XGraph(2, 0, (NOISE, NOISE),
               {(0, 1): ("u", 1), (1, 1): ("u", 2)}, [(0, 1)])
    return LinComb.of(g)


def phi_ito(a: LinComb) -> LinComb:
    """Expand every merged two-output generator back into a noise pair.

    Star edges on a merged vertex distribute over both members, so this is a
    right inverse of ``m_ito`` up to the pair-averaging (``M_ito = phi_ito
    after m_ito``).
    """
    def per_graph(g):
        out = LinComb.of(g)
        while True:
            gp = next((v for term in out.terms for v, t in enumerate(term.types)
                       if t.name == GPAIR.name), None)
            if gp is None:
                return out
            out = out.map_terms(lambda h: _expand_first_pair(h))
        return out

    return a.map_terms(per_graph)


def _expand_first_pair(g: XGraph) -> LinComb:
    v = next((v for v, t in enumerate(g.types) if t.name == GPAIR.name), None)
    if v is None:
        return LinComb.of(g)
    return substitute_vertex(g, v, _pair_image())
