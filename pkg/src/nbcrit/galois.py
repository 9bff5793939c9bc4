"""Elementary abelian p-extensions N/K as explicit K-algebras.

``N = K(x_1, ..., x_n)`` where every layer is either Kummer (``x^p = u``,
needs a primitive p-th root of unity in K) or Artin-Schreier
(``x^p - x = f``, characteristic p).  Elements are coordinate vectors over
the monomial basis ``x^J``, ``J`` in ``{0..p-1}^n`` (lexicographic order).

The Galois group is identified with ``(Z/p)^n``: the vector ``c`` sends
``x_i`` to ``zeta^{c_i} x_i`` (Kummer) or ``x_i + c_i`` (Artin-Schreier).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .localfield import GroundField, KElement

KUMMER = "kummer"
ARTIN_SCHREIER = "artin_schreier"

GaloisVector = tuple[int, ...]


class ExtensionError(ValueError):
    """The layers do not define a totally ramified (C_p)^n-extension."""

    def __init__(self, message: str, layer: int | None = None, relation: str | None = None):
        super().__init__(message)
        self.layer = layer
        self.relation = relation


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    datum: KElement

    def __post_init__(self):
        if self.kind not in (KUMMER, ARTIN_SCHREIER):
            raise ExtensionError(f"unknown layer kind {self.kind!r}")


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_json() for c in self.checks]}


class Subgroup:
    """A subgroup of ``(Z/p)^n`` stored by its reduced echelon basis."""

    def __init__(self, p: int, n: int, generators: Sequence[Sequence[int]] = ()):
        for g in generators:
            if len(g) != n:
                raise ValueError(f"generator {tuple(g)} has wrong length for n = {n}")
        self.p = p
        self.n = n
        self.basis = linalg.fp_rref(generators, p)
        self._elements = None

    @classmethod
    def trivial(cls, p: int, n: int) -> "Subgroup":
        return cls(p, n)

    @classmethod
    def full(cls, p: int, n: int) -> "Subgroup":
        return cls(p, n, [tuple(int(i == j) for j in range(n)) for i in range(n)])

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def order(self) -> int:
        return self.p ** self.rank

    def elements(self) -> list[GaloisVector]:
        if self._elements is None:
            out = set()
            for coeffs in itertools.product(range(self.p), repeat=self.rank):
                v = [0] * self.n
                for c, row in zip(coeffs, self.basis):
                    for i, x in enumerate(row):
                        v[i] = (v[i] + c * x) % self.p
                out.add(tuple(v))
            self._elements = sorted(out)
        return self._elements

    def nontrivial(self) -> list[GaloisVector]:
        return [s for s in self.elements() if any(s)]

    def __contains__(self, sigma) -> bool:
        sigma = tuple(x % self.p for x in sigma)
        return len(linalg.fp_rref(list(self.basis) + [sigma], self.p)) == self.rank

    def __le__(self, other: "Subgroup") -> bool:
        return all(row in other for row in self.basis)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and (self.p, self.n, self.basis) == (other.p, other.n, other.basis)

    def __hash__(self):
        return hash((self.p, self.n, self.basis))

    def annihilator(self) -> tuple[GaloisVector, ...]:
        return linalg.fp_annihilator(self.basis, self.n, self.p)

    def to_json(self) -> dict:
        return {"order": self.order, "generators": [list(r) for r in self.basis]}

    def __repr__(self):
        return f"Subgroup(order={self.order}, basis={list(self.basis)})"


class NElement:
    """An element of N as coordinates over the monomial basis."""

    __slots__ = ("parent", "coords", "_val")

    def __init__(self, parent: "ExtensionField", coords):
        self.parent = parent
        self.coords = tuple(coords)
        self._val = None

    def _coerce(self, other):
        if isinstance(other, NElement):
            if other.parent is not self.parent:
                raise ValueError("elements of different extensions")
            return other
        if isinstance(other, (int, Fraction, KElement)):
            return self.parent.from_k(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NElement(self.parent, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NElement(self.parent, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return NElement(self.parent, [-a for a in self.coords])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, KElement)):
            c = self.parent.ground(other)
            return NElement(self.parent, [a * c for a in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.parent._mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, KElement)):
            return self * self.parent.ground(other).inverse()
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.parent.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "NElement":
        """Product of the nontrivial conjugates divided by the norm."""
        N = self.parent
        acc = N.one
        for s in N.group.nontrivial():
            acc = acc * N.act(s, self)
        norm = (acc * self).coords[0]
        if norm.is_zero():
            raise ZeroDivisionError("element is zero or a zero divisor")
        return acc * norm.inverse()

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def in_ground(self) -> bool:
        return all(c.is_zero() for c in self.coords[1:])

    def to_ground(self) -> KElement:
        if not self.in_ground():
            raise ValueError("element does not lie in K")
        return self.coords[0]

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return all(a == b for a, b in zip(self.coords, other.coords))

    __hash__ = None

    @property
    def valuation(self):
        if self._val is None:
            self._val = self.parent.valuation(self)
        return self._val

    def __repr__(self):
        return f"NElement({self.parent.format(self)})"


class ExtensionField:
    """The algebra ``K[x_1..x_n]`` modulo the layer relations.

    Use :func:`build_extension` to get a validated field with a uniformizer.
    """

    def __init__(self, ground: GroundField, layers: Sequence[LayerSpec]):
        self.ground = ground
        self.layers = tuple(layers)
        self.p = ground.p
        self.n = len(self.layers)
        self.degree = self.p ** self.n
        kinds = {l.kind for l in self.layers}
        if len(kinds) > 1:
            raise ExtensionError("layers must all be Kummer or all Artin-Schreier")
        self.kind = kinds.pop() if kinds else None
        if self.kind == KUMMER and ground.zeta is None:
            raise ExtensionError("Kummer layers need a primitive p-th root of unity in K")
        if self.kind == ARTIN_SCHREIER and ground.characteristic != self.p:
            raise ExtensionError("Artin-Schreier layers need characteristic p")
        for i, l in enumerate(self.layers, start=1):
            if l.datum.field is not ground:
                raise ExtensionError(f"layer {i}: datum is not an element of K", layer=i)
            if l.datum.is_zero():
                raise ExtensionError(f"layer {i}: zero datum", layer=i)
        self.exponents = list(itertools.product(range(self.p), repeat=self.n))
        self.index = {J: i for i, J in enumerate(self.exponents)}
        self._reduction = [self._layer_reduction(l) for l in self.layers]
        self._mtab: dict = {}
        self._actions: dict = {}
        self.group = Subgroup.full(self.p, self.n)
        zeros = [ground.zero] * self.degree
        self.zero = NElement(self, zeros)
        self.one = NElement(self, [ground.one] + zeros[1:])
        self.uniformizer: NElement | None = None
        self.uniformizer_log: list[str] = []
        if self.kind == KUMMER:
            self._zeta_powers = [ground.zeta ** k for k in range(self.p)]

    # -- construction helpers ---------------------------------------------
    def _layer_reduction(self, layer: LayerSpec):
        """For s in [0, 2p-2]: x^s as a list of (exponent, coefficient or None)."""
        p = self.p
        table = []
        for s in range(2 * p - 1):
            if s < p:
                table.append([(s, None)])
            elif layer.kind == KUMMER:
                table.append([(s - p, layer.datum)])
            else:
                table.append([(s - p + 1, None), (s - p, layer.datum)])
        return table

    def element(self, coords) -> NElement:
        coords = [self.ground(c) for c in coords]
        if len(coords) != self.degree:
            raise ValueError("wrong number of coordinates")
        return NElement(self, coords)

    def from_k(self, a) -> NElement:
        a = self.ground(a)
        return NElement(self, [a] + [self.ground.zero] * (self.degree - 1))

    def monomial(self, J: Sequence[int], coeff=None) -> NElement:
        coords = [self.ground.zero] * self.degree
        coords[self.index[tuple(J)]] = self.ground.one if coeff is None else self.ground(coeff)
        return NElement(self, coords)

    def gen(self, i: int) -> NElement:
        return self.monomial(tuple(int(j == i) for j in range(self.n)))

    @property
    def is_cyclic(self) -> bool:
        return self.n == 1

    # -- multiplication ---------------------------------------------------
    def _mterms(self, i: int, j: int):
        key = (i, j)
        terms = self._mtab.get(key)
        if terms is None:
            I, J = self.exponents[i], self.exponents[j]
            per_layer = [self._reduction[l][I[l] + J[l]] for l in range(self.n)]
            acc: dict = {}
            for combo in itertools.product(*per_layer):
                idx = self.index[tuple(e for e, _ in combo)]
                coeff = None
                for _, c in combo:
                    if c is not None:
                        coeff = c if coeff is None else coeff * c
                prev = acc.get(idx)
                one = self.ground.one
                if prev is None:
                    acc[idx] = coeff
                else:
                    acc[idx] = (one if prev is None else prev) + (one if coeff is None else coeff)
            terms = list(acc.items())
            self._mtab[key] = terms
        return terms

    def _mul(self, a: NElement, b: NElement) -> NElement:
        out = list(self.zero.coords)
        nz_a = [(i, x) for i, x in enumerate(a.coords) if not x.is_zero()]
        nz_b = [(j, y) for j, y in enumerate(b.coords) if not y.is_zero()]
        for i, x in nz_a:
            for j, y in nz_b:
                prod = x * y
                for idx, c in self._mterms(i, j):
                    out[idx] = out[idx] + (prod if c is None else prod * c)
        res = NElement(self, out)
        if a._val is not None and b._val is not None:
            res._val = a._val + b._val
        return res

    # -- Galois action ----------------------------------------------------
    def _action(self, sigma: GaloisVector):
        table = self._actions.get(sigma)
        if table is not None:
            return table
        p, K = self.p, self.ground
        table = []
        for J in self.exponents:
            if self.kind == KUMMER:
                k = sum(c * j for c, j in zip(sigma, J)) % p
                table.append([(self.index[J], None if k == 0 else self._zeta_powers[k])])
                continue
            per_layer = []
            for c, j in zip(sigma, J):
                # (x + c)^j = sum_k binom(j, k) c^(j-k) x^k
                per_layer.append([(k, math.comb(j, k) * pow(c, j - k, p) % p) for k in range(j + 1)])
            terms: dict = {}
            for combo in itertools.product(*per_layer):
                coeff = 1
                for _, c in combo:
                    coeff = coeff * c % p
                if coeff:
                    idx = self.index[tuple(k for k, _ in combo)]
                    terms[idx] = (terms.get(idx, 0) + coeff) % p
            table.append([(idx, None if c == 1 else K(c)) for idx, c in terms.items() if c])
        self._actions[sigma] = table
        return table

    def act(self, sigma: Sequence[int], y: NElement) -> NElement:
        sigma = tuple(x % self.p for x in sigma)
        if not any(sigma):
            return y
        out = list(self.zero.coords)
        for J, x in enumerate(y.coords):
            if x.is_zero():
                continue
            for idx, c in self._action(sigma)[J]:
                out[idx] = out[idx] + (x if c is None else x * c)
        res = NElement(self, out)
        res._val = y._val
        return res

    # -- norm, valuation, trace -------------------------------------------
    def mult_matrix(self, y: NElement):
        cols = [(y * self.monomial(J)).coords for J in self.exponents]
        return [[cols[j][i] for j in range(self.degree)] for i in range(self.degree)]

    def norm(self, y: NElement) -> KElement:
        return linalg.det(self.mult_matrix(y), self.ground.zero, self.ground.one)

    def valuation(self, y: NElement):
        """v_N(y) = v_K(det of multiplication by y); ``math.inf`` for zero."""
        if y.is_zero():
            return math.inf
        nm = self.norm(y)
        if nm.is_zero():
            raise ExtensionError("nonzero element with zero norm: the algebra is not a field")
        return nm.valuation

    def leading_digit(self, y: NElement) -> int:
        """Residue of ``y / pi_N^v`` in ``F_p``, read off from norms."""
        nm = self.norm(y)
        lead = nm.leading_digit
        pn = self.norm(self.uniformizer).leading_digit
        return lead * pow(pn, -nm.valuation, self.p) % self.p

    def trace(self, y: NElement, H: Subgroup | None = None) -> NElement:
        H = self.group if H is None else H
        acc = self.zero
        for s in H.elements():
            acc = acc + self.act(s, y)
        return acc

    # -- display ----------------------------------------------------------
    def format(self, y: NElement) -> str:
        terms = []
        for J, c in zip(self.exponents, y.coords):
            if c.is_zero():
                continue
            mono = "*".join(f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(J) if e)
            coeff = self.ground._be.describe(c._value)
            terms.append(coeff if not mono else f"{coeff}*{mono}")
        return " + ".join(terms) if terms else "0"

    def coords_json(self, y: NElement, digits: int | None = None) -> dict:
        return {
            "".join(map(str, J)): c.to_digit_string(digits)
            for J, c in zip(self.exponents, y.coords)
            if not c.is_zero()
        }

    def describe(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "kind": self.kind,
            "layers": [
                {"kind": l.kind, "datum": l.datum.to_digit_string()} for l in self.layers
            ],
            "uniformizer": self.format(self.uniformizer) if self.uniformizer is not None else None,
        }


# -- uniformizer search -------------------------------------------------------

def _element_of_valuation(N: ExtensionField, known, w: int) -> NElement:
    """Product of known elements (non-negative exponents) and a power of pi_K."""
    d = N.degree
    vals = [v for _, v in known]
    for total in range(0, d * len(known) + 1):
        for exps in itertools.product(range(d), repeat=len(known)):
            if sum(exps) != total:
                continue
            rest = w - sum(a * v for a, v in zip(exps, vals))
            if rest % d == 0:
                z = N.from_k(N.ground.pi_power(rest // d))
                for (elem, _), a in zip(known, exps):
                    if a:
                        z = z * elem ** a
                z._val = w
                return z
    raise ArithmeticError(f"valuation {w} not in the value group")


def _classify_stall(N: ExtensionField, pair) -> str:
    """Explain why subtracting the residue ratio did not raise the valuation.

    The reduced characteristic polynomial of ``y/z`` has a root in F_p
    exactly when some factor of the algebra sees that residue, i.e. the
    algebra splits; otherwise the residue field of the layer is larger.
    """
    y, z = pair
    K = N.ground
    q = y * z.inverse()
    cp = linalg.charpoly(N.mult_matrix(q), K.zero, K.one)
    if any(c.valuation < 0 for c in cp):
        return "degree collapse: the algebra is not a field (datum is a p-th power or AS-trivial in K)"
    red = [c.residue() for c in cp]
    if any(sum(r * pow(a, j, N.p) for j, r in enumerate(red)) % N.p == 0 for a in range(N.p)):
        return "degree collapse: the algebra is not a field (datum is a p-th power or AS-trivial in K)"
    return "residue field grows, extension is not totally ramified"


def _find_uniformizer(N: ExtensionField) -> NElement:
    """Successive residue reduction of each layer generator.

    Each generator is pushed away from the subfield generated so far until
    its valuation leaves the current value group; total ramification makes
    the final value group all of Z.
    """
    d, p, K = N.degree, N.p, N.ground
    known: list[tuple[NElement, int]] = []
    log = []
    for i in range(N.n):
        y = N.gen(i)
        start = prev = None
        while True:
            if y.is_zero():
                raise ExtensionError("generator lies in the field of earlier layers", layer=i + 1)
            nm = N.norm(y)
            if nm.is_zero():
                raise ExtensionError(
                    f"degree collapse: {N.format(y)} is a zero divisor, the algebra is not a field",
                    layer=i + 1,
                    relation=f"{N.format(y)} is a zero divisor",
                )
            w = nm.valuation
            if start is None:
                start = w
            elif w <= prev:
                raise ExtensionError(_classify_stall(N, stalled), layer=i + 1)
            if w - start > d * K.precision_cap:
                raise ExtensionError(
                    f"degree collapse to the precision cap {K.precision_cap}", layer=i + 1
                )
            group = math.gcd(d, *[v for _, v in known])
            if w % group:
                break
            z = _element_of_valuation(N, known, w)
            a = nm.leading_digit * pow(N.norm(z).leading_digit, -1, p) % p
            stalled = (y, z)
            y = y - z * a
            prev = w
        y._val = w
        known.append((y, w))
        log.append(f"layer {i + 1}: {N.format(y)} has valuation {w}")
    if math.gcd(d, *[v for _, v in known]) != 1:
        raise ExtensionError("value group is not Z: extension is not totally ramified", layer=N.n)
    pi = _element_of_valuation(N, known, 1)
    N.uniformizer_log = log
    return pi


def _is_eisenstein(coeffs: Sequence[KElement]) -> bool:
    return (
        coeffs[-1] == 1
        and coeffs[0].valuation == 1
        and all(c.valuation >= 1 for c in coeffs[1:-1])
    )


def validate_extension(N: ExtensionField) -> ValidationReport:
    """Field, degree, total ramification and group-order checks."""
    report = ValidationReport()
    K = N.ground
    pi = N.uniformizer
    report.checks.append(Check("uniformizer_found", pi is not None))
    if pi is None:
        return report
    cp = linalg.charpoly(N.mult_matrix(pi), K.zero, K.one)
    eis = _is_eisenstein(cp)
    report.checks.append(Check(
        "totally_ramified_field",
        eis,
        f"characteristic polynomial of pi_N of degree {len(cp) - 1} "
        + ("is Eisenstein" if eis else "is not Eisenstein: the algebra is not a field (degree collapse)"),
    ))
    report.checks.append(Check("degree", len(cp) - 1 == N.degree, f"[N:K] = {N.degree} = p^{N.n}"))
    gens = [N.gen(i) for i in range(N.n)]
    order_ok = True
    for i in range(N.n):
        e_i = tuple(int(j == i) for j in range(N.n))
        for j, x in enumerate(gens):
            y = x
            for _ in range(N.p):
                y = N.act(e_i, y)
            order_ok &= y == x
        order_ok &= N.act(e_i, gens[i]) != gens[i]
    report.checks.append(Check("sigma_order_p", order_ok, "each generator has order p and moves its layer"))
    if N.n:
        rows = []
        for i in range(N.n):
            e_i = tuple(int(j == i) for j in range(N.n))
            for J in N.exponents:
                y = N.act(e_i, N.monomial(J)) - N.monomial(J)
                rows.append(list(y.coords))
        # columns of the stacked (sigma_i - 1) images; fixed space = kernel
        mat = [[rows[r][c] for r in range(len(rows))] for c in range(N.degree)]
        fixed_dim = N.degree - linalg.rank(list(map(list, zip(*mat))))
        report.checks.append(Check("fixed_field_is_K", fixed_dim == 1, f"dim of G-fixed subspace = {fixed_dim}"))
    return report


def _layer_problem(ground: GroundField, layers: Sequence[LayerSpec]) -> ExtensionError | None:
    """Why ``layers`` fail to give a totally ramified field, or ``None``."""
    N = ExtensionField(ground, layers)
    try:
        N.uniformizer = _find_uniformizer(N)
    except ExtensionError as exc:
        return exc
    rep = validate_extension(N)
    if rep.ok:
        return None
    return ExtensionError("; ".join(c.detail or c.name for c in rep.failures()), layer=len(layers))


def _find_relation(ground: GroundField, layers: Sequence[LayerSpec]) -> str | None:
    """A combination of the data involving the last layer that is trivial in K."""
    p, k = ground.p, len(layers)
    for a in itertools.product(range(p), repeat=k - 1):
        a = a + (1,)
        if layers[0].kind == KUMMER:
            datum = ground.one
            for l, e in zip(layers, a):
                datum = datum * l.datum ** e
            text = " * ".join(f"u{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(a) if e)
            claim = f"{text} = {datum.to_digit_string(8)} is a p-th power in K"
        else:
            datum = ground.zero
            for l, e in zip(layers, a):
                datum = datum + l.datum * e
            text = " + ".join((f"{e}*" if e > 1 else "") + f"f{i + 1}" for i, e in enumerate(a) if e)
            claim = f"{text} = {datum.to_digit_string(8)} has the form g^p - g in K"
        if datum.is_zero() or _layer_problem(ground, [LayerSpec(layers[0].kind, datum)]) is not None:
            return claim
    return None


def build_extension(ground: GroundField, layers: Sequence[LayerSpec], validate: bool = True) -> ExtensionField:
    """Build N/K, find a uniformizer of N and validate total ramification.

    Every single layer is checked on its own first so a failure names the
    layer; then prefixes are built so dependence is blamed on the first
    layer that introduces it, together with the relation among the data.
    """
    layers = list(layers)
    if not validate:
        N = ExtensionField(ground, layers)
        try:
            N.uniformizer = _find_uniformizer(N)
        except ExtensionError:
            N.uniformizer = None
        return N
    for i, layer in enumerate(layers, start=1):
        exc = _layer_problem(ground, [layer])
        if exc is not None:
            raise ExtensionError(f"layer {i}: {exc}", layer=i, relation=exc.relation)
    N = ExtensionField(ground, [])
    N.uniformizer = _find_uniformizer(N)
    for k in range(2, len(layers) + 1):
        exc = _layer_problem(ground, layers[:k])
        if exc is not None:
            relation = _find_relation(ground, layers[:k]) or exc.relation
            raise ExtensionError(
                f"layer {k} is dependent on earlier layers: {relation or exc}", layer=k, relation=relation
            )
    if layers:
        N = ExtensionField(ground, layers)
        N.uniformizer = _find_uniformizer(N)
    return N


def n_valuation(y: NElement):
    return y.parent.valuation(y)


def apply_galois(sigma: Sequence[int], y: NElement) -> NElement:
    return y.parent.act(sigma, y)


# -- fixed fields and traces -------------------------------------------------

class FixedField:
    """``L = N^H`` with its own presentation and the inclusion ``L -> N``."""

    def __init__(self, N: ExtensionField, H: Subgroup):
        self.N = N
        self.H = H
        self.rows = H.annihilator()
        K = N.ground
        if N.kind == KUMMER:
            layers = []
            for a in self.rows:
                u = K.one
                for ui, ai in zip(N.layers, a):
                    u = u * ui.datum ** ai
                layers.append(LayerSpec(KUMMER, u))
            gens = [N.monomial(a) for a in self.rows]
        else:
            layers = []
            gens = []
            for a in self.rows:
                f = K.zero
                y = N.zero
                for i, (li, ai) in enumerate(zip(N.layers, a)):
                    f = f + li.datum * ai
                    y = y + N.gen(i) * ai
                layers.append(LayerSpec(ARTIN_SCHREIER, f))
                gens.append(y)
        self.L = build_extension(K, layers)
        self.images = []
        for E in self.L.exponents:
            img = N.one
            for g, e in zip(gens, E):
                if e:
                    img = img * g ** e
            self.images.append(img)
        # section: pick rows where the embedded basis is invertible
        B = [[img.coords[r] for img in self.images] for r in range(N.degree)]
        _, pivots = linalg._echelon([list(col) for col in zip(*B)])
        self._rows = pivots
        sub = [B[r] for r in pivots]
        self._inv = linalg.inverse(sub, K.zero, K.one)

    @property
    def degree(self) -> int:
        return self.L.degree

    def embed(self, l: NElement) -> NElement:
        acc = self.N.zero
        for c, img in zip(l.coords, self.images):
            if not c.is_zero():
                acc = acc + img * c
        return acc

    def section(self, y: NElement) -> NElement:
        K = self.N.ground
        vec = [y.coords[r] for r in self._rows]
        coords = []
        for row in self._inv:
            acc = K.zero
            for a, b in zip(row, vec):
                acc = acc + a * b
            coords.append(acc)
        l = NElement(self.L, coords)
        if self.embed(l) != y:
            raise ValueError("element does not lie in the fixed field")
        return l

    def restrict(self, sigma: Sequence[int]) -> GaloisVector:
        p = self.N.p
        return tuple(sum(a * c for a, c in zip(row, sigma)) % p for row in self.rows)


def fixed_field(N: ExtensionField, H: Subgroup) -> FixedField:
    return FixedField(N, H)


def trace_to(N: ExtensionField, H, rho: NElement) -> NElement:
    """Sum of ``sigma(rho)`` over ``sigma`` in ``H`` (a Subgroup or FixedField)."""
    if isinstance(H, FixedField):
        H = H.H
    return N.trace(rho, H)


def index_p_subgroups(p: int, n: int) -> list[Subgroup]:
    """All hyperplanes ``{c : a.c = 0}``, one per functional up to scalars."""
    out = []
    for a in itertools.product(range(p), repeat=n):
        if not any(a):
            continue
        if next(x for x in a if x) != 1:
            continue
        ann = linalg.fp_annihilator([a], n, p)
        out.append(Subgroup(p, n, ann))
    return out
