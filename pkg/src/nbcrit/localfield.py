"""Exact arithmetic in the ground field K.

Two backends share one element type, :class:`KElement`:

* characteristic zero: ``K`` is a totally ramified extension of ``Q_p`` given
  by a tower of Eisenstein polynomials.  The tower is flattened to a single
  absolute Eisenstein polynomial ``G`` over ``Q`` and elements are stored in
  the number field ``Q[X]/(G)``, which is dense in ``K``.
* characteristic ``p``: ``K = F_p((t))`` and elements are stored in the
  rational function field ``F_p(t)``.

Everything built from finite digit data stays inside these dense subfields,
so valuations and zero tests are exact.  The π-adic digit expansion is
available as a view via :meth:`KElement.digits`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import flint
import sympy

DEFAULT_PRECISION = 64
DEFAULT_PRECISION_CAP = 1024

Scalar = Union[int, Fraction, "KElement"]


class FieldError(ValueError):
    """Invalid ground field description."""


def vp_int(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _vp_fmpq(c, p: int) -> int:
    return vp_int(int(c.p), p) - vp_int(int(c.q), p)


def _fmpq_mod_p(c, p: int) -> int:
    return int(c.p) * pow(int(c.q), -1, p) % p


def parse_digits(text: str) -> tuple[tuple[int, ...], int]:
    """Parse ``"d0,d1,...@v"`` into ``(digits, v)``; ``@v`` defaults to 0."""
    text = text.strip()
    body, _, shift = text.partition("@")
    try:
        digits = tuple(int(d) for d in body.split(",") if d.strip() != "")
        v = int(shift) if shift.strip() else 0
    except ValueError as exc:
        raise FieldError(f"malformed digit string {text!r}") from exc
    if not digits:
        raise FieldError(f"empty digit string {text!r}")
    return digits, v


def format_digits(digits: Sequence[int], v: int) -> str:
    return ",".join(str(d) for d in digits) + f"@{v}"


@dataclass(frozen=True)
class GroundFieldSpec:
    """Description of K.

    ``tower`` lists Eisenstein polynomials from the bottom up, each as its
    coefficient tokens (constant term first, monic leading 1 last).  A token
    is an integer or a digit string in the uniformizer of the field below.
    An empty tower means ``K = Q_p``.  Ignored in characteristic ``p``.
    """

    characteristic: int
    p: int
    tower: tuple[tuple[str, ...], ...] = ()
    default_precision: int = DEFAULT_PRECISION
    precision_cap: int = DEFAULT_PRECISION_CAP


class _CharZero:
    """Backend: values are ``fmpq_poly`` reduced modulo the absolute polynomial."""

    def __init__(self, p: int, modulus):
        self.p = p
        self.G = modulus
        self.e = modulus.degree()
        self.zero = flint.fmpq_poly([])
        self.one = flint.fmpq_poly([1])
        self.pi = flint.fmpq_poly([0, 1]) % modulus
        self._pi_inv = self.inverse(self.pi)

    def from_int(self, n):
        return flint.fmpq_poly([n])

    def from_fraction(self, q: Fraction):
        return flint.fmpq_poly([flint.fmpq(q.numerator, q.denominator)])

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        r = a * b
        return r % self.G if r.degree() >= self.e else r

    def is_zero(self, a):
        return a.is_zero()

    def eq(self, a, b):
        return a == b

    def inverse(self, a):
        g, s, _ = a.xgcd(self.G)
        if g.degree() != 0:
            raise ZeroDivisionError("element is not invertible")
        return (s * flint.fmpq_poly([1 / g.coeffs()[0]])) % self.G

    def valuation(self, a):
        best = math.inf
        e, p = self.e, self.p
        for j, c in enumerate(a.coeffs()):
            if c != 0:
                best = min(best, e * _vp_fmpq(c, p) + j)
        return best

    def pi_power(self, k: int):
        base = self.pi if k >= 0 else self._pi_inv
        k = abs(k)
        result = self.one
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def unit_part(self, a, v):
        return self.mul(a, self.pi_power(-v))

    def residue_of_unit(self, u) -> int:
        cs = u.coeffs()
        return _fmpq_mod_p(cs[0], self.p) if cs else 0

    def shift_down(self, a):
        return self.mul(a, self._pi_inv)

    def key(self, a):
        return tuple((int(c.p), int(c.q)) for c in a.coeffs())

    def describe(self, a):
        return str(a)


class _CharP:
    """Backend: values are ``(s, num, den)`` meaning ``t^s * num / den``.

    ``num(0) != 0``, ``den(0) != 0``, ``gcd(num, den) == 1`` and ``den`` monic
    for nonzero values; zero is ``(0, 0, 1)``.
    """

    def __init__(self, p: int):
        self.p = p
        self.e = 1
        self._one_poly = flint.nmod_poly([1], p)
        self.zero = (0, flint.nmod_poly([], p), self._one_poly)
        self.one = (0, self._one_poly, self._one_poly)
        self.pi = (1, self._one_poly, self._one_poly)

    def _poly(self, coeffs):
        return flint.nmod_poly(list(coeffs), self.p)

    @staticmethod
    def _order(poly) -> int:
        for i, c in enumerate(poly.coeffs()):
            if int(c):
                return i
        raise ValueError("zero polynomial")

    def _normalize(self, s, num, den):
        if num.is_zero():
            return self.zero
        k = self._order(num)
        if k:
            num = num.right_shift(k)
            s += k
        if not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num, den = num // g, den // g
            lc = int(den.leading_coefficient())
            if lc != 1:
                inv = pow(lc, -1, self.p)
                num, den = num * inv, den * inv
        return (s, num, den)

    def from_int(self, n):
        n %= self.p
        return self.zero if n == 0 else (0, self._poly([n]), self._one_poly)

    def from_fraction(self, q: Fraction):
        if q.denominator % self.p == 0:
            raise ZeroDivisionError("denominator vanishes in characteristic p")
        return self.from_int(q.numerator * pow(q.denominator, -1, self.p))

    def from_laurent(self, coeffs, shift):
        return self._normalize(shift, self._poly(coeffs), self._one_poly)

    def add(self, a, b):
        if a[1].is_zero():
            return b
        if b[1].is_zero():
            return a
        s1, n1, d1 = a
        s2, n2, d2 = b
        s = min(s1, s2)
        if d1.is_one() and d2.is_one():
            num = n1.left_shift(s1 - s) + n2.left_shift(s2 - s)
            return self._normalize(s, num, d1)
        num = (n1 * d2).left_shift(s1 - s) + (n2 * d1).left_shift(s2 - s)
        return self._normalize(s, num, d1 * d2)

    def neg(self, a):
        return (a[0], -a[1], a[2])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a[1].is_zero() or b[1].is_zero():
            return self.zero
        s1, n1, d1 = a
        s2, n2, d2 = b
        if d1.is_one() and d2.is_one():
            return (s1 + s2, n1 * n2, d1)
        return self._normalize(s1 + s2, n1 * n2, d1 * d2)

    def is_zero(self, a):
        return a[1].is_zero()

    def eq(self, a, b):
        return a[0] == b[0] and a[1] == b[1] and a[2] == b[2]

    def inverse(self, a):
        if a[1].is_zero():
            raise ZeroDivisionError("element is zero")
        return self._normalize(-a[0], a[2], a[1])

    def valuation(self, a):
        return math.inf if a[1].is_zero() else a[0]

    def pi_power(self, k: int):
        return (k, self._one_poly, self._one_poly)

    def unit_part(self, a, v):
        return (0, a[1], a[2])

    def residue_of_unit(self, u) -> int:
        n0 = int(u[1].coeffs()[0])
        d0 = int(u[2].coeffs()[0])
        return n0 * pow(d0, -1, self.p) % self.p

    def shift_down(self, a):
        return self.zero if a[1].is_zero() else (a[0] - 1, a[1], a[2])

    def series(self, a, count):
        """First ``count`` coefficients of ``num/den`` as a power series."""
        inv = a[2].inverse_series_trunc(count)
        prod = (a[1] * inv).truncate(count)
        cs = [int(c) for c in prod.coeffs()]
        return cs + [0] * (count - len(cs))

    def key(self, a):
        return (a[0], tuple(int(c) for c in a[1].coeffs()), tuple(int(c) for c in a[2].coeffs()))

    def describe(self, a):
        s, num, den = a
        body = f"({num})" if den.is_one() else f"({num})/({den})"
        return body.replace("x", "t") + (f"*t^{s}" if s else "")


class KElement:
    """An exact element of K.

    Supports ``+ - * / **`` with ints, Fractions and other elements of the
    same field.  ``valuation`` is ``math.inf`` for zero.
    """

    __slots__ = ("field", "_value", "_val")

    def __init__(self, field: "GroundField", value):
        self.field = field
        self._value = value
        self._val = None

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, KElement):
            if other.field is not self.field:
                raise ValueError("elements belong to different ground fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def _wrap(self, value):
        return KElement(self.field, value)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.field._be.add(self._value, other._value))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.field._be.sub(self._value, other._value))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return self._wrap(self.field._be.neg(self._value))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = self._wrap(self.field._be.mul(self._value, other._value))
        if self._val is not None and other._val is not None:
            out._val = self._val + other._val
        return out

    __rmul__ = __mul__

    def inverse(self) -> "KElement":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in K")
        out = self._wrap(self.field._be.inverse(self._value))
        if self._val is not None:
            out._val = -self._val
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.field._be.eq(self._value, other._value)

    __hash__ = None

    # -- valuation and digits --------------------------------------------
    def is_zero(self) -> bool:
        return self.field._be.is_zero(self._value)

    @property
    def valuation(self):
        """v_K of this element (``math.inf`` for zero)."""
        if self._val is None:
            self._val = self.field._be.valuation(self._value)
        return self._val

    @property
    def precision(self):
        """Always ``None``: elements are exact."""
        return None

    @property
    def leading_digit(self) -> int:
        """Residue of ``self / pi^v``, an integer in ``1..p-1``."""
        if self.is_zero():
            raise ValueError("zero has no leading digit")
        be = self.field._be
        return be.residue_of_unit(be.unit_part(self._value, self.valuation))

    def residue(self) -> int:
        v = self.valuation
        if v < 0:
            raise ValueError("residue of a non-integral element")
        return 0 if v > 0 else self.leading_digit

    def digits(self, count: int | None = None) -> list[int]:
        """The first ``count`` π-adic digits (in ``0..p-1``) from the valuation on."""
        count = self.field.precision if count is None else count
        if self.is_zero():
            return [0] * count
        be = self.field._be
        u = be.unit_part(self._value, self.valuation)
        if isinstance(be, _CharP):
            return be.series(u, count)
        out = []
        p = self.field.p
        for _ in range(count):
            d = be.residue_of_unit(u) if not be.is_zero(u) else 0
            out.append(d)
            u = be.shift_down(be.sub(u, be.from_int(d)))
        return out

    def to_digit_string(self, count: int | None = None) -> str:
        if self.is_zero():
            return "0@0"
        return format_digits(self.digits(count), self.valuation)

    def __repr__(self):
        return f"KElement({self.field._be.describe(self._value)})"


class GroundField:
    """The ground field K with its uniformizer and optional p-th root of unity."""

    def __init__(self, spec: GroundFieldSpec, backend, tower_polys=()):
        self.spec = spec
        self.p = spec.p
        self.characteristic = spec.characteristic
        self.precision = spec.default_precision
        self.precision_cap = spec.precision_cap
        self._be = backend
        self.e = backend.e
        self.tower_polys = tuple(tower_polys)
        self.zero = KElement(self, backend.zero)
        self.one = KElement(self, backend.one)
        self.uniformizer = KElement(self, backend.pi)
        self.zeta = self._find_zeta()

    def __call__(self, x: Scalar) -> KElement:
        if isinstance(x, KElement):
            if x.field is not self:
                raise ValueError("element of a different field")
            return x
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return KElement(self, self._be.from_int(x))
        if isinstance(x, Fraction):
            return KElement(self, self._be.from_fraction(x))
        raise TypeError(f"cannot coerce {type(x).__name__} into K")

    @property
    def absolute_polynomial(self):
        """Eisenstein polynomial of the uniformizer over Q (char 0 only)."""
        if self.characteristic != 0:
            return None
        return [Fraction(int(c.p), int(c.q)) for c in self._be.G.coeffs()]

    def pi_power(self, k: int) -> KElement:
        x = KElement(self, self._be.pi_power(k))
        x._val = k
        return x

    def from_digits(self, digits: Sequence[int], v: int = 0) -> KElement:
        """``sum(d_j * pi^(v+j))`` for integer digits ``d_j`` (any sign)."""
        if self.characteristic != 0:
            return KElement(self, self._be.from_laurent(digits, v))
        be = self._be
        acc = be.zero
        for d in reversed(digits):
            acc = be.add(be.mul(acc, be.pi), be.from_int(d))
        return KElement(self, be.mul(acc, be.pi_power(v)))

    def parse(self, text: str) -> KElement:
        digits, v = parse_digits(text)
        return self.from_digits(digits, v)

    def random_element(self, valuation: int, rng: random.Random, digits: int | None = None) -> KElement:
        digits = self.precision if digits is None else digits
        ds = [rng.randrange(1, self.p)] + [rng.randrange(self.p) for _ in range(digits - 1)]
        x = self.from_digits(ds, valuation)
        x._val = valuation
        return x

    def random_integral(self, rng: random.Random, digits: int | None = None) -> KElement:
        """Uniform digits from position 0 on; may be zero."""
        digits = self.precision if digits is None else digits
        return self.from_digits([rng.randrange(self.p) for _ in range(digits)], 0)

    def describe(self) -> dict:
        out = {
            "characteristic": self.characteristic,
            "p": self.p,
            "e_K": self.e,
            "zeta_present": self.zeta is not None,
        }
        if self.characteristic == 0:
            out["absolute_eisenstein"] = [str(c) for c in self.absolute_polynomial]
        return out

    # -- p-th roots of unity ----------------------------------------------
    def _find_zeta(self):
        if self.characteristic != 0:
            return None
        p, e = self.p, self.e
        if p == 2:
            return self(-1)
        if e % (p - 1):
            return None
        s = e // (p - 1)
        pis = self.pi_power(s)
        scale = self.pi_power(-e)

        def F(u):
            y = 1 + pis * u
            return sum((y ** k for k in range(p)), self.zero) * scale

        def dF(u):
            y = 1 + pis * u
            return sum((k * y ** (k - 1) for k in range(1, p)), self.zero) * pis * scale

        u = next((self(a) for a in range(1, p) if F(self(a)).valuation >= 1), None)
        if u is None:
            return None
        target = 2 * self.precision
        for _ in range(64):
            val = F(u)
            if val.is_zero() or val.valuation >= target:
                break
            u = u - val / dF(u)
            u = self.from_digits(u.digits(target), u.valuation)
        zeta = 1 + pis * u
        if sum((zeta ** k for k in range(p)), self.zero).is_zero():
            return zeta
        modulus = p ** max(1, target // e - 1)
        coeffs = [_ratrec(int(c.p) * pow(int(c.q), -1, modulus) % modulus, modulus) for c in zeta._value.coeffs()]
        if any(c is None for c in coeffs):
            raise FieldError("p-th root of unity could not be recognised exactly")
        zeta = KElement(self, flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in coeffs]) % self._be.G)
        if not sum((zeta ** k for k in range(p)), self.zero).is_zero():
            raise FieldError(
                "K contains a primitive p-th root of unity only as a p-adic limit; "
                "choose a tower whose number field contains it"
            )
        return zeta


def _ratrec(a: int, m: int):
    bound = math.isqrt(m // 2)
    r0, r1, s0, s1 = m, a, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(s1, m) != 1:
        return None
    return Fraction(r1, s1)


def _is_eisenstein(coeffs: Sequence[KElement]) -> bool:
    if not coeffs or coeffs[-1] != 1:
        return False
    if coeffs[0].valuation != 1:
        return False
    return all(c.valuation >= 1 for c in coeffs[1:-1])


def _flatten_layer(below: GroundField, layer: Sequence[KElement]):
    """Absolute polynomial of a root of ``layer`` (a polynomial over ``below``)."""
    X, Y = sympy.symbols("X Y")
    G = sum(sympy.Rational(int(c.p), int(c.q)) * Y ** j for j, c in enumerate(below._be.G.coeffs()))
    f = 0
    for k, c in enumerate(layer):
        cy = sum(sympy.Rational(int(q.p), int(q.q)) * Y ** j for j, q in enumerate(c._value.coeffs()))
        f += cy * X ** k
    res = sympy.Poly(sympy.resultant(G, f, Y), X)
    coeffs = [sympy.Rational(c) for c in reversed(res.all_coeffs())]
    lead = coeffs[-1]
    return flint.fmpq_poly([flint.fmpq(int((c / lead).p), int((c / lead).q)) for c in coeffs])


def make_ground_field(spec: GroundFieldSpec) -> GroundField:
    """Validate ``spec`` and build the field context."""
    p = spec.p
    if not isinstance(p, int) or p < 2 or not sympy.isprime(p):
        raise FieldError(f"p = {p!r} is not prime")
    if spec.default_precision < 1 or spec.precision_cap < spec.default_precision:
        raise FieldError("precision must be positive and at most the cap")
    if spec.characteristic == p:
        return GroundField(spec, _CharP(p))
    if spec.characteristic != 0:
        raise FieldError(f"characteristic must be 0 or p, got {spec.characteristic}")

    base_spec = GroundFieldSpec(0, p, (), spec.default_precision, spec.precision_cap)
    qp = GroundField(base_spec, _CharZero(p, flint.fmpq_poly([-p, 1])))
    field = qp
    for i, layer in enumerate(spec.tower, start=1):
        coeffs = [field.parse(tok) if not _is_int(tok) else field(int(tok)) for tok in layer]
        if len(coeffs) < 2 or not _is_eisenstein(coeffs):
            raise FieldError(f"tower layer {i} is not Eisenstein over the field below")
        G = _flatten_layer(field, coeffs)
        field = GroundField(base_spec, _CharZero(p, G))
        if not _is_eisenstein([qp(Fraction(int(c.p), int(c.q))) for c in G.coeffs()]):
            raise FieldError(f"tower layer {i}: flattened polynomial is not Eisenstein")
    return GroundField(spec, field._be)


def _is_int(tok) -> bool:
    if isinstance(tok, int):
        return True
    try:
        int(tok)
    except ValueError:
        return False
    return True


def k_valuation(a: KElement):
    return a.valuation


def random_k_element(field: GroundField, valuation: int, seed: int, digits: int | None = None) -> KElement:
    """Deterministic random element of exact valuation ``valuation``."""
    return field.random_element(valuation, random.Random(seed), digits)
