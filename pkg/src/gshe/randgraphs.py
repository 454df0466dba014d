"""Seeded random well-formed graphs for property tests and check suites."""

from __future__ import annotations

import random

from .graphs import XGraph


def random_graph(rng: random.Random, gens, max_vertices=4, max_low=2,
                 pair_noises=False, noise_name="Xi", min_u=0, min_low=0):
    """A uniform-ish random valid graph over the given generator list.

    Retries until the slot balance admits a wiring.  Not a uniform sampler;
    good enough to exercise the axioms.
    """
    for _ in range(400):
        n = rng.randint(1, max_vertices)
        types = [rng.choice(gens) for _ in range(n)]
        total_out = sum(t.out_arity for t in types)
        natives = [(v, j) for v, t in enumerate(types)
                   for j in range(1, t.in_arity + 1)]
        if min_u > total_out or min_low > max_low:
            continue
        l = rng.randint(min_low, max_low)
        u = rng.randint(min_u, total_out)
        if total_out - u + l < len(natives):
            continue
        out_slots = [(v, j) for v, t in enumerate(types)
                     for j in range(1, t.out_arity + 1)]
        rng.shuffle(out_slots)
        to_up = out_slots[:u]
        rest = out_slots[u:] + [("l", k) for k in range(1, l + 1)]
        rng.shuffle(rest)
        wiring = {}
        for k, s in enumerate(to_up, start=1):
            wiring[s] = ("u", k)
        for tgt, s in zip(natives, rest):
            wiring[s] = tgt
        for s in rest[len(natives):]:
            wiring[s] = (rng.randrange(n), 0)
        pairing = []
        if pair_noises:
            noise_vs = [v for v, t in enumerate(types) if t.name == noise_name]
            if len(noise_vs) % 2:
                continue
            rng.shuffle(noise_vs)
            pairing = [tuple(noise_vs[i:i + 2]) for i in range(0, len(noise_vs), 2)]
        return XGraph(u, l, types, wiring, pairing)
    raise RuntimeError("could not sample a valid graph with these parameters")


def random_lincomb(rng, gens, n_terms=2, degree=None, coeff_range=3, **kw):
    """Random linear combination; if ``degree`` is set, all terms match it."""
    from .algebra import LinComb

    out = LinComb()
    tries = 0
    while len(out) < n_terms and tries < 500:
        tries += 1
        g = random_graph(rng, gens, **kw)
        if degree is not None and g.degree != degree:
            continue
        c = rng.randint(-coeff_range, coeff_range)
        if c:
            out = out + LinComb.of(g, c)
    return out


def random_degree_graph(rng, gens, degree, **kw):
    """Rejection-sample a graph of a fixed degree."""
    for _ in range(2000):
        g = random_graph(rng, gens, **kw)
        if g.degree == degree:
            return g
    raise RuntimeError(f"no graph of degree {degree} sampled")


def random_permutation(rng, n):
    p = list(range(1, n + 1))
    rng.shuffle(p)
    return tuple(p)
