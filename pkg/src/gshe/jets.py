"""Truncated multivariate Taylor jets with exact rational coefficients.

``Jet`` is a scalar jet at a base point (coordinates are displacements, so
"the value at the point" is the order-zero coefficient).  ``TensorJet``
carries a (u, l)-indexed family of jets and realises the tensor operations
mirroring the graph side: slot permutation, product, trace of the last
upper/lower pair, derivation prepending a lower slot.  The valuation maps
noise generators to vector-field jets and the Christoffel generator to twice
the Christoffel jet, then evaluates graphs by recursive contraction.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .algebra import LinComb
from .graphs import DegreeError, XGraph
from .symbols import GAMMA, GPAIR, NOISE, iota_expand


def _multi_indices(d, order):
    if d == 0:
        yield ()
        return
    for total in range(order + 1):
        for cuts in itertools.combinations(range(total + d - 1), d - 1):
            prev = -1
            idx = []
            for c in cuts:
                idx.append(c - prev - 1)
                prev = c
            idx.append(total + d - 2 - prev)
            yield tuple(idx)


class Jet:
    """Scalar jet: map from multi-indices (total degree <= order) to Fraction."""

    __slots__ = ("d", "order", "coeffs")

    def __init__(self, d, order, coeffs=None):
        self.d = d
        self.order = order
        self.coeffs = {}
        if coeffs:
            for k, v in coeffs.items():
                v = Fraction(v)
                if v and sum(k) <= order:
                    self.coeffs[tuple(k)] = v

    @classmethod
    def constant(cls, d, order, value):
        return cls(d, order, {tuple([0] * d): Fraction(value)})

    @classmethod
    def coordinate(cls, d, order, k):
        idx = [0] * d
        idx[k] = 1
        return cls(d, order, {tuple(idx): Fraction(1)})

    def value(self):
        """The order-zero coefficient: the value at the base point."""
        return self.coeffs.get(tuple([0] * self.d), Fraction(0))

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Jet(self.d, min(self.order, other.order), out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        s = Fraction(scalar)
        return Jet(self.d, self.order, {k: s * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.__rmul__(other)
        order = min(self.order, other.order)
        out = {}
        for k1, v1 in self.coeffs.items():
            if sum(k1) > order:
                continue
            for k2, v2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                if sum(k) > order:
                    continue
                out[k] = out.get(k, Fraction(0)) + v1 * v2
        return Jet(self.d, order, out)

    def __neg__(self):
        return (-1) * self

    def partial(self, k):
        """Derivative in direction k; the effective order drops by one."""
        out = {}
        for idx, v in self.coeffs.items():
            if idx[k] == 0:
                continue
            new = list(idx)
            new[k] -= 1
            out[tuple(new)] = v * idx[k]
        return Jet(self.d, self.order - 1, out)

    def truncate(self, order):
        return Jet(self.d, order, self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, Jet) and self.d == other.d
                and self.coeffs == other.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"Jet(d={self.d}, o={self.order}, {len(self.coeffs)} terms)"


def zero_jet(d, order):
    return Jet(d, order, {})


def jet_inv_sqrt(j: Jet) -> Jet:
    """(1 + u)^(-1/2) for j = 1 + u with u of positive valuation."""
    one = tuple([0] * j.d)
    if j.coeffs.get(one) != 1:
        raise ValueError("jet_inv_sqrt needs constant term exactly 1")
    u = Jet(j.d, j.order, {k: v for k, v in j.coeffs.items() if k != one})
    out = Jet.constant(j.d, j.order, 1)
    term = Jet.constant(j.d, j.order, 1)
    coef = Fraction(1)
    for k in range(1, j.order + 1):
        coef *= Fraction(-(2 * k - 1), 2 * k)
        term = term * u
        if not term:
            break
        out = out + coef * term
    return out


def matrix_inverse(mat):
    """Inverse of a square matrix of jets with invertible constant term."""
    n = len(mat)
    d, order = mat[0][0].d, mat[0][0].order
    const = [[mat[i][j].value() for j in range(n)] for i in range(n)]
    inv0 = _rational_matrix_inverse(const)
    # X = inv0 * sum_k (-(A - A0) inv0)^k ; the deviation has valuation >= 1.
    deviation = [[Jet(d, order, {k: v for k, v in mat[i][j].coeffs.items()
                                 if sum(k) > 0}) for j in range(n)]
                 for i in range(n)]
    b0 = [[Jet.constant(d, order, inv0[i][j]) for j in range(n)] for i in range(n)]
    term = b0
    out = [row[:] for row in b0]
    for _ in range(order):
        m1 = _mat_mul(deviation, term)
        term = _mat_mul(b0, m1)
        term = [[-1 * term[i][j] for j in range(n)] for i in range(n)]
        if not any(term[i][j] for i in range(n) for j in range(n)):
            break
        out = [[out[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    return out


class InversionError(ValueError):
    pass


def _rational_matrix_inverse(mat):
    n = len(mat)
    aug = [[Fraction(mat[i][j]) for j in range(n)]
           + [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise InversionError("singular constant term")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _mat_mul(a, b):
    n = len(a)
    return [[_sum_jets([a[i][k] * b[k][j] for k in range(n)])
             for j in range(n)] for i in range(n)]


def _sum_jets(js):
    out = js[0]
    for j in js[1:]:
        out = out + j
    return out


class TensorJet:
    """A (u, l)-graded array of jets; keys are (lower..., upper...) tuples."""

    __slots__ = ("u", "l", "d", "order", "comps")

    def __init__(self, u, l, d, order, comps=None):
        self.u, self.l, self.d, self.order = u, l, d, order
        self.comps = {}
        if comps:
            for k, j in comps.items():
                if j:
                    self.comps[tuple(k)] = j

    @property
    def degree(self):
        return (self.u, self.l)

    def comp(self, key):
        return self.comps.get(tuple(key), zero_jet(self.d, self.order))

    def keys(self):
        return itertools.product(range(self.d), repeat=self.l + self.u)

    def __add__(self, other):
        if (self.u, self.l) != (other.u, other.l):
            raise DegreeError("tensor degrees differ")
        out = dict(self.comps)
        for k, j in other.comps.items():
            s = out.get(k)
            out[k] = j if s is None else s + j
        return TensorJet(self.u, self.l, self.d, min(self.order, other.order), out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        return TensorJet(self.u, self.l, self.d, self.order,
                         {k: scalar * j for k, j in self.comps.items()})

    def __eq__(self, other):
        return (isinstance(other, TensorJet) and self.degree == other.degree
                and self.comps == other.comps)

    def __bool__(self):
        return bool(self.comps)

    def value(self, key):
        return self.comp(key).value()

    def act(self, alpha):
        """Slot permutation: the new factor at position p is the old one at
        position alpha^-1(p), matching the action on graph externals."""
        pu, pl = alpha
        if len(pu) != self.u or len(pl) != self.l:
            raise DegreeError("permutation degree mismatch")
        ipu = [0] * self.u
        for i, x in enumerate(pu):
            ipu[x - 1] = i
        ipl = [0] * self.l
        for i, x in enumerate(pl):
            ipl[x - 1] = i
        out = {}
        for k, j in self.comps.items():
            lows, ups = k[:self.l], k[self.l:]
            nk = (tuple(lows[ipl[i]] for i in range(self.l))
                  + tuple(ups[ipu[i]] for i in range(self.u)))
            out[nk] = out.get(nk, zero_jet(self.d, self.order)) + j
        return TensorJet(self.u, self.l, self.d, self.order, out)

    def product(self, other):
        out = {}
        for k1, j1 in self.comps.items():
            l1, u1 = k1[:self.l], k1[self.l:]
            for k2, j2 in other.comps.items():
                l2, u2 = k2[:other.l], k2[other.l:]
                nk = l1 + l2 + u1 + u2
                j = j1 * j2
                if j:
                    out[nk] = out.get(nk, zero_jet(self.d, self.order)) + j
        return TensorJet(self.u + other.u, self.l + other.l, self.d,
                         min(self.order, other.order), out)

    def trace(self):
        if self.u < 1 or self.l < 1:
            raise DegreeError("trace needs degree >= (1,1)")
        out = {}
        for k, j in self.comps.items():
            lows, ups = k[:self.l], k[self.l:]
            if lows[-1] != ups[-1]:
                continue
            nk = lows[:-1] + ups[:-1]
            out[nk] = out.get(nk, zero_jet(self.d, self.order)) + j
        return TensorJet(self.u - 1, self.l - 1, self.d, self.order, out)

    def derive(self):
        out = {}
        for k, j in self.comps.items():
            for b in range(self.d):
                dj = j.partial(b)
                if dj:
                    nk = (b,) + k
                    out[nk] = out.get(nk, zero_jet(self.d, self.order)) + dj
        return TensorJet(self.u, self.l + 1, self.d, self.order - 1, out)

    def contract_lower(self, pos, vec):
        """Contract lower slot ``pos`` (1-based) with a (1,0) tensor."""
        if vec.degree != (1, 0):
            raise DegreeError("contract_lower takes a vector")
        out = {}
        for k, j in self.comps.items():
            lows, ups = k[:self.l], k[self.l:]
            idx = lows[pos - 1]
            val = vec.comps.get((idx,))
            if val is None:
                continue
            nk = lows[:pos - 1] + lows[pos:] + ups
            pj = j * val
            if pj:
                out[nk] = out.get(nk, zero_jet(self.d, self.order)) + pj
        return TensorJet(self.u, self.l - 1, self.d, min(self.order, vec.order), out)

    def __repr__(self):
        return f"TensorJet(({self.u},{self.l}), d={self.d}, o={self.order})"


def vector_jet(d, order, jets) -> TensorJet:
    return TensorJet(1, 0, d, order, {(a,): j for a, j in enumerate(jets)})


def format_jet(j: Jet) -> str:
    """One ``(multi_index) = p/q`` line per coefficient, sorted."""
    lines = [f"jet d={j.d} order={j.order}"]
    for idx in sorted(j.coeffs):
        lines.append(f"({','.join(str(k) for k in idx)}) = {j.coeffs[idx]}")
    return "\n".join(lines)


def parse_jet(text: str) -> Jet:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "jet":
        raise ValueError("expected 'jet d=<d> order=<order>' header")
    kv = dict(p.split("=") for p in head[1:])
    d, order = int(kv["d"]), int(kv["order"])
    coeffs = {}
    for ln in lines[1:]:
        left, right = ln.split("=")
        idx = tuple(int(x) for x in left.strip().strip("()").split(","))
        coeffs[idx] = Fraction(right.strip())
    return Jet(d, order, coeffs)


def tensors_agree(t1: TensorJet, t2: TensorJet, order=None) -> bool:
    """Componentwise equality up to the common valid truncation order."""
    if t1.degree != t2.degree or t1.d != t2.d:
        return False
    if order is None:
        order = min(t1.order, t2.order)
    keys = set(t1.comps) | set(t2.comps)
    return all(t1.comp(k).truncate(order) == t2.comp(k).truncate(order)
               for k in keys)


def tensor_from_fn(u, l, d, order, fn) -> TensorJet:
    comps = {}
    for key in itertools.product(range(d), repeat=u + l):
        j = fn(*key)
        if j:
            comps[key] = j
    return TensorJet(u, l, d, order, comps)


# -- the valuation -------------------------------------------------------------

class Valuation:
    """Morphism data: jets for the Christoffel generator and noise fields."""

    def __init__(self, gamma: TensorJet, sigmas, h: TensorJet = None):
        self.gamma = gamma
        self.sigmas = list(sigmas)
        self.h = h
        self.d = gamma.d if gamma is not None else self.sigmas[0].d
        self.order = gamma.order if gamma is not None else self.sigmas[0].order

    def generator_tensor(self, name):
        if name == GAMMA.name:
            return 2 * self.gamma
        if name == NOISE.name:
            raise ValueError("plain noise needs a label; apply iota first")
        if name.startswith("Xi"):
            i = int(name[2:])
            return self.sigmas[i - 1]
        if name == "h":
            if self.h is None:
                raise ValueError("no jet supplied for the h generator")
            return self.h
        if name == GPAIR.name:
            out = self.sigmas[0].product(self.sigmas[0])
            for s in self.sigmas[1:]:
                out = out + s.product(s)
            return out
        raise ValueError(f"no jet for generator {name!r}")

    def evaluate_graph(self, g: XGraph) -> TensorJet:
        """Evaluate one graph; trees use recursive contraction."""
        if g.pairing:
            raise ValueError("evaluate_graph takes labelled (unpaired) graphs")
        if g.l == 0 and g.u <= 1 and _is_rooted_forest(g):
            return self._evaluate_tree(g)
        return self._evaluate_decompose(g)

    def _evaluate_tree(self, g: XGraph) -> TensorJet:
        children = {v: {"star": [], "native": {}} for v in range(g.n_vertices)}
        roots = []
        for src, dst in g.wiring.items():
            if dst[0] == "u":
                roots.append(src[0])
            elif dst[1] == 0:
                children[dst[0]]["star"].append(src[0])
            else:
                children[dst[0]]["native"][dst[1]] = src[0]

        memo = {}

        def value(v):
            if v in memo:
                return memo[v]
            t = g.types[v]
            tens = self.generator_tensor(t.name)
            stars = children[v]["star"]
            for _ in stars:
                tens = tens.derive()
            # lower slots now: [stars..., natives...]; contract from the front
            for w in stars:
                tens = tens.contract_lower(1, value(w))
            for j in range(1, t.in_arity + 1):
                tens = tens.contract_lower(1, value(children[v]["native"][j]))
            memo[v] = tens
            return tens

        if g.u == 1:
            return value(roots[0])
        # degree (0,0): product of the traces of closed components is not a
        # tree; _is_rooted_forest only admits the empty graph here.
        return TensorJet(0, 0, self.d, self.order,
                         {(): Jet.constant(self.d, self.order, 1)})

    def _evaluate_decompose(self, g: XGraph) -> TensorJet:
        from .algebra import decompose

        m, alpha, parts = decompose(g)
        prod = TensorJet(0, 0, self.d, self.order,
                         {(): Jet.constant(self.d, self.order, 1)})
        for dcount, t in parts:
            piece = self.generator_tensor(t.name)
            for _ in range(dcount):
                piece = piece.derive()
            prod = prod.product(piece)
        out = prod.act(alpha)
        for _ in range(m):
            out = out.trace()
        return out

    def __call__(self, a) -> TensorJet:
        """Evaluate a LinComb of labelled graphs or one paired symbol."""
        if isinstance(a, XGraph):
            if a.pairing:
                a = iota_expand(a, len(self.sigmas))
            else:
                a = LinComb.of(a)
        out = None
        for g, c in a.terms.items():
            if g.pairing:
                val = self(iota_expand(g, len(self.sigmas)))
            else:
                val = self.evaluate_graph(g)
            val = c * val
            out = val if out is None else out + val
        if out is None:
            degs = a.degrees()
            u, l = next(iter(degs)) if degs else (0, 0)
            return TensorJet(u, l, self.d, self.order, {})
        return out


def _is_rooted_forest(g: XGraph) -> bool:
    """Every output feeds an internal slot or up:1; acyclic; no low slots."""
    if g.l != 0 or g.has_directed_cycle():
        return False
    ups = sum(1 for d in g.wiring.values() if d[0] == "u")
    return ups == g.u


def upsilon(gamma: TensorJet, sigmas, element, h: TensorJet = None) -> TensorJet:
    """Evaluate an element of the symbol span on concrete jets."""
    return Valuation(gamma, sigmas, h)(element)


# -- differential geometry oracles ---------------------------------------------

def random_jet(rng, d, order, spread=2):
    coeffs = {}
    for idx in _multi_indices(d, order):
        coeffs[idx] = Fraction(rng.randint(-spread, spread),
                               rng.randint(1, spread))
    return Jet(d, order, coeffs)


def random_vector_field(rng, d, order, spread=2):
    return vector_jet(d, order, [random_jet(rng, d, order, spread)
                                 for _ in range(d)])


def random_gamma(rng, d, order, spread=2):
    """A (1,2) tensor jet symmetric in its two lower slots."""
    comps = {}
    for b in range(d):
        for c in range(b, d):
            for a in range(d):
                j = random_jet(rng, d, order, spread)
                comps[(b, c, a)] = j
                comps[(c, b, a)] = j
    return TensorJet(1, 2, d, order, comps)


def inverse_metric(sigmas) -> TensorJet:
    """g^{ab} = sum_i sigma_i^a sigma_i^b as a (2,0) tensor jet."""
    out = sigmas[0].product(sigmas[0])
    for s in sigmas[1:]:
        out = out + s.product(s)
    return out


def levi_civita(sigmas) -> TensorJet:
    """Christoffel jets of the Levi-Civita connection of sum sigma sigma^T."""
    d, order = sigmas[0].d, sigmas[0].order
    ginv = inverse_metric(sigmas)
    ginv_mat = [[ginv.comp((a, b)) for b in range(d)] for a in range(d)]
    gmat = matrix_inverse(ginv_mat)
    comps = {}
    for a in range(d):
        for b in range(d):
            for c in range(d):
                total = zero_jet(d, order)
                for e in range(d):
                    term = (gmat[e][c].partial(b) + gmat[e][b].partial(c)
                            - gmat[b][c].partial(e))
                    total = total + ginv_mat[a][e] * term
                comps[(b, c, a)] = Fraction(1, 2) * total
    return TensorJet(1, 2, d, order - 1, comps)


def riemann(gamma: TensorJet) -> TensorJet:
    """Curvature (1,3) jet with slots in X, Y, Z order.

    comps[(b, c, e, a)] is the a-component of R(e_b, e_c) e_e =
    (nabla_b nabla_c - nabla_c nabla_b) e_e, antisymmetric in (b, c).
    """
    d, order = gamma.d, gamma.order

    def G(a, b, c):
        return gamma.comp((b, c, a))

    comps = {}
    for b in range(d):
        for c in range(d):
            for e in range(d):
                for a in range(d):
                    j = G(a, c, e).partial(b) - G(a, b, e).partial(c)
                    for z in range(d):
                        j = j + G(a, b, z) * G(z, c, e) - G(a, c, z) * G(z, b, e)
                    comps[(b, c, e, a)] = j
    return TensorJet(1, 3, d, order - 1, comps)


def covariant_vector_derivative(gamma: TensorJet, x: TensorJet, y: TensorJet):
    """(nabla_X Y)^a = X^b d_b Y^a + Gamma^a_{bc} X^b Y^c."""
    d, order = y.d, y.order - 1
    comps = {}
    for a in range(d):
        j = zero_jet(d, order)
        for b in range(d):
            j = j + x.comp((b,)) * y.comp((a,)).partial(b)
            for c in range(d):
                j = j + gamma.comp((b, c, a)) * x.comp((b,)) * y.comp((c,))
        comps[(a,)] = j
    return TensorJet(1, 0, d, order, comps)


def nabla_inverse_metric(gamma: TensorJet, ginv: TensorJet) -> TensorJet:
    """(nabla_z g)^{ab} as a (2,1) tensor with key (z, a, b)."""
    d, order = ginv.d, ginv.order - 1
    comps = {}
    for z in range(d):
        for a in range(d):
            for b in range(d):
                j = ginv.comp((a, b)).partial(z)
                for n in range(d):
                    j = (j + gamma.comp((z, n, a)) * ginv.comp((n, b))
                         + gamma.comp((z, n, b)) * ginv.comp((a, n)))
                comps[(z, a, b)] = j
    return TensorJet(2, 1, d, order, comps)


def nabla_riemann(gamma: TensorJet, riem: TensorJet) -> TensorJet:
    """(nabla_z R)^a_{b,c,e} as a (1,4) tensor with key (z, b, c, e, a)."""
    d, order = riem.d, riem.order - 1
    comps = {}
    for z in range(d):
        for b in range(d):
            for c in range(d):
                for e in range(d):
                    for a in range(d):
                        j = riem.comp((b, c, e, a)).partial(z)
                        for n in range(d):
                            j = j + gamma.comp((z, n, a)) * riem.comp((b, c, e, n))
                            j = j - gamma.comp((z, b, n)) * riem.comp((n, c, e, a))
                            j = j - gamma.comp((z, c, n)) * riem.comp((b, n, e, a))
                            j = j - gamma.comp((z, e, n)) * riem.comp((b, c, n, a))
                        comps[(z, b, c, e, a)] = j
    return TensorJet(1, 4, d, order, comps)


def curvature_counterterm(gamma: TensorJet, sigmas) -> TensorJet:
    """-R^a_{b,c,e} g^{bz} (nabla_z g)^{ce}: the expected value of tau_star.

    The X slot contracts against the inverse metric, the (Y, Z) pair against
    the covariant derivative of the inverse metric.
    """
    d = gamma.d
    riem = riemann(gamma)
    ginv = inverse_metric(sigmas)
    ng = nabla_inverse_metric(gamma, ginv)
    order = min(riem.order, ng.order)
    comps = {}
    for a in range(d):
        j = zero_jet(d, order)
        for b in range(d):
            for c in range(d):
                for e in range(d):
                    for z in range(d):
                        j = j - riem.comp((b, c, e, a)) * ginv.comp((b, z)) \
                            * ng.comp((z, c, e))
        comps[(a,)] = j
    return TensorJet(1, 0, d, order, comps)


def gradient_counterterm(gamma: TensorJet, sigmas) -> TensorJet:
    """(nabla_z R)^a_{b,c,e} g^{zc} g^{be}: the expected value of tau_c."""
    d = gamma.d
    riem = riemann(gamma)
    ginv = inverse_metric(sigmas)
    nr = nabla_riemann(gamma, riem)
    order = nr.order
    comps = {}
    for a in range(d):
        j = zero_jet(d, order)
        for z in range(d):
            for b in range(d):
                for c in range(d):
                    for e in range(d):
                        j = j + nr.comp((z, b, c, e, a)) * ginv.comp((z, c)) \
                            * ginv.comp((b, e))
        comps[(a,)] = j
    return TensorJet(1, 0, d, order, comps)


def scalar_curvature_gradient(gamma: TensorJet, sigmas) -> TensorJet:
    """g^{az} d_z (g^{ce} Ric_{ce}) with Ric_{ce} = R^a_{a,c,e}."""
    d = gamma.d
    riem = riemann(gamma)
    ginv = inverse_metric(sigmas)
    order = riem.order
    scal = zero_jet(d, order)
    for c in range(d):
        for e in range(d):
            ric = zero_jet(d, order)
            for a in range(d):
                ric = ric + riem.comp((a, c, e, a))
            scal = scal + ginv.comp((c, e)) * ric
    comps = {}
    for a in range(d):
        j = zero_jet(d, order - 1)
        for z in range(d):
            j = j + ginv.comp((a, z)) * scal.partial(z)
        comps[(a,)] = j
    return TensorJet(1, 0, d, order - 1, comps)


# -- sphere embedding ----------------------------------------------------------

def sphere_frame(p, order=5):
    """Jets of the closest-point projection frame at a rational sphere point.

    Returns (sigmas, gamma): sigma_i = d_i pi and the ambient connection
    coefficients Gamma^a_{bc} = -d2_{bc} pi^a for pi(y) = y/|y|.
    """
    p = [Fraction(x) for x in p]
    d = len(p)
    if sum(x * x for x in p) != 1:
        raise ValueError("base point must lie on the unit sphere exactly")
    # |p + x|^2 = 1 + u with u = 2 p.x + |x|^2
    r2 = Jet.constant(d, order + 2, 1)
    coords = [Jet.coordinate(d, order + 2, k) for k in range(d)]
    for k in range(d):
        r2 = r2 + 2 * p[k] * coords[k] + coords[k] * coords[k]
    invnorm = jet_inv_sqrt(r2)
    pi = [(Jet.constant(d, order + 2, p[k]) + coords[k]) * invnorm
          for k in range(d)]
    sigmas = []
    for i in range(d):
        sigmas.append(vector_jet(d, order + 1,
                                 [pi[a].partial(i) for a in range(d)]))
    comps = {}
    for b in range(d):
        for c in range(d):
            for a in range(d):
                comps[(b, c, a)] = -1 * pi[a].partial(b).partial(c)
    gamma = TensorJet(1, 2, d, order, comps)
    return sigmas, gamma
