"""Lower and upper ramification breaks of N/K and the sums t_H."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .galois import (
    Check,
    ExtensionField,
    GaloisVector,
    NElement,
    Subgroup,
    fixed_field,
    index_p_subgroups,
)


class StructuralError(RuntimeError):
    """An identity that must hold for any valid extension failed."""


@dataclass(frozen=True)
class RamificationData:
    p: int
    n: int
    lower_breaks: tuple[int, ...]
    orders: tuple[int, ...]  # g_{b_i}, aligned with lower_breaks
    upper_breaks: tuple[Fraction, ...]
    t_G: int
    sigma_breaks: tuple[tuple[GaloisVector, int], ...]

    @property
    def m(self) -> int:
        return len(self.lower_breaks)

    @property
    def degree(self) -> int:
        return self.p ** self.n

    @property
    def b_max(self) -> int | None:
        return self.lower_breaks[-1] if self.lower_breaks else None

    @property
    def order_at_break(self) -> dict[int, int]:
        return dict(zip(self.lower_breaks, self.orders))

    @property
    def hypothesis_ok(self) -> bool:
        return check_hypothesis(self).ok

    def break_of(self, sigma: Sequence[int]) -> int:
        return dict(self.sigma_breaks)[tuple(sigma)]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "m": self.m,
            "lower_breaks": list(self.lower_breaks),
            "order_at_break": {str(b): g for b, g in zip(self.lower_breaks, self.orders)},
            "upper_breaks": [str(u) for u in self.upper_breaks],
            "t_G": self.t_G,
            "b_max": self.b_max,
            "hypothesis_ok": self.hypothesis_ok,
            "sigma_breaks": {"".join(map(str, s)): b for s, b in self.sigma_breaks},
        }


@dataclass(frozen=True)
class HypothesisResult:
    ok: bool
    failing: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"ok": self.ok, "failing_upper_breaks": [str(u) for u in self.failing]}


def sigma_break(N: ExtensionField, sigma: Sequence[int], uniformizer: NElement | None = None) -> int:
    """``i(sigma) = v_N(sigma(pi_N) - pi_N) - 1``."""
    pi = N.uniformizer if uniformizer is None else uniformizer
    diff = N.act(sigma, pi) - pi
    if diff.is_zero():
        raise StructuralError(f"sigma = {tuple(sigma)} fixes pi_N")
    return N.valuation(diff) - 1


def lower_to_upper(lower_breaks: Sequence[int], orders: Sequence[int], degree: int) -> tuple[Fraction, ...]:
    """``u_i = (b_1 g_1 + (b_2 - b_1) g_2 + ... + (b_i - b_{i-1}) g_i) / p^n``, asserted integral."""
    out = []
    acc = Fraction(0)
    prev = 0
    for b, g in zip(lower_breaks, orders):
        acc += Fraction((b - prev) * g, degree)
        prev = b
        if acc.denominator != 1:
            raise StructuralError(f"upper break {acc} is not an integer")
        out.append(acc)
    return tuple(out)


def compute_filtration(N: ExtensionField, uniformizer: NElement | None = None) -> RamificationData:
    pi = N.uniformizer if uniformizer is None else uniformizer
    if pi is None or N.valuation(pi) != 1:
        raise StructuralError("filtration needs an element of valuation 1")
    breaks = tuple((s, sigma_break(N, s, pi)) for s in N.group.nontrivial())
    if any(b < 1 for _, b in breaks):
        raise StructuralError("G_1 != G: extension is not wildly totally ramified")
    lower = tuple(sorted({b for _, b in breaks}))
    orders = tuple(1 + sum(1 for _, i in breaks if i >= b) for b in lower)
    for b, g in zip(lower, orders):
        members = [s for s, i in breaks if i >= b]
        if Subgroup(N.p, N.n, members).order != g:
            raise StructuralError(f"G_{b} is not a subgroup")
    upper = lower_to_upper(lower, orders, N.degree)
    return RamificationData(
        p=N.p,
        n=N.n,
        lower_breaks=lower,
        orders=orders,
        upper_breaks=upper,
        t_G=sum(b for _, b in breaks),
        sigma_breaks=breaks,
    )


def group_at(data: RamificationData, b: int) -> Subgroup:
    """The lower ramification group ``G_b``."""
    return Subgroup(data.p, data.n, [s for s, i in data.sigma_breaks if i >= b])


def t_sum(data: RamificationData, H: Subgroup) -> int:
    """Sum of the breaks of the nontrivial elements of H."""
    breaks = dict(data.sigma_breaks)
    return sum(breaks[s] for s in H.nontrivial())


def t_sum_by_intersections(data: RamificationData, H: Subgroup) -> int:
    """``sum_i b_i |H_{b_i} minus H_{b_i + 1}|`` with ``H_j = G_j ∩ H``."""
    total = 0
    for b in data.lower_breaks:
        here = [s for s in H.elements() if s in group_at(data, b)]
        after = [s for s in H.elements() if s in group_at(data, b + 1)]
        total += b * (len(here) - len(after))
    return total


def largest_break(data: RamificationData, H: Subgroup) -> int | None:
    """Largest lower break of N/N^H (lower numbering passes to subgroups)."""
    vals = [data.break_of(s) for s in H.nontrivial()]
    return max(vals) if vals else None


def check_hypothesis(data: RamificationData) -> HypothesisResult:
    failing = tuple(u for u in data.upper_breaks if u.denominator != 1 or math.gcd(int(u), data.p) != 1)
    return HypothesisResult(not failing, failing)


def quotient_breaks(N: ExtensionField) -> dict[tuple[int, ...], int]:
    """Break of every degree-p quotient ``N^H / K``, keyed by the functional cutting out H."""
    out = {}
    for H in index_p_subgroups(N.p, N.n):
        F = fixed_field(N, H)
        qd = compute_filtration(F.L)
        out[F.rows[0]] = qd.lower_breaks[0]
    return out


def alternative_uniformizers(N: ExtensionField, seed: int = 0) -> list[NElement]:
    """pi_N times a random unit, and pi_N^(1+p^n) / pi_K."""
    rng = random.Random(seed)
    K = N.ground
    pi = N.uniformizer
    unit = N.from_k(K.random_element(0, rng, 8))
    power = N.one
    for _ in range(1, N.degree):
        power = power * pi
        unit = unit + power * K.from_digits([rng.randrange(K.p) for _ in range(4)], 0)
    other = pi ** (1 + N.degree) * K.pi_power(-1)
    return [pi * unit, other]


def structural_checks(data: RamificationData, N: ExtensionField | None = None, seed: int = 0) -> list[Check]:
    """Identities every filtration must satisfy; with N, also the quotient and uniformizer checks."""
    p, d = data.p, data.degree
    checks = []
    if not data.lower_breaks:
        checks.append(Check("trivial_extension", True, "no breaks"))
        return checks
    checks.append(Check("first_order_full", data.orders[0] == d, f"g_(b_1) = {data.orders[0]}, p^n = {d}"))
    dec = all(a > b for a, b in zip(data.orders, data.orders[1:])) and data.orders[-1] >= p
    checks.append(Check("orders_decreasing", dec, f"orders {list(data.orders)}"))
    cong = len({b % p for b in data.lower_breaks}) == 1
    checks.append(Check("breaks_congruent_mod_p", cong, f"breaks {list(data.lower_breaks)} mod {p}"))
    checks.append(Check(
        "u1_equals_b1", data.upper_breaks[0] == data.lower_breaks[0],
        f"u_1 = {data.upper_breaks[0]}, b_1 = {data.lower_breaks[0]}",
    ))
    integral = all(u.denominator == 1 for u in data.upper_breaks)
    checks.append(Check("upper_integral", integral, f"upper breaks {[str(u) for u in data.upper_breaks]}"))
    div = all(
        (g * (b - a)) % d == 0
        for a, b, g in zip(data.lower_breaks, data.lower_breaks[1:], data.orders[1:])
    )
    checks.append(Check("hasse_arf_divisibility", div, "p^n divides g_(b_i) (b_i - b_(i-1))"))
    formula = sum(
        b * (g - g_next)
        for b, g, g_next in zip(data.lower_breaks, data.orders, data.orders[1:] + (1,))
    )
    checks.append(Check("t_G_formula", formula == data.t_G, f"enumeration {data.t_G}, formula {formula}"))
    bm = data.b_max
    cyclic_note = bm % p != 0 or data.n == 1
    detail = f"b_max = {bm}" + (" is divisible by p, which forces N/K cyclic" if bm % p == 0 else "")
    checks.append(Check("b_max_divisible_forces_cyclic", cyclic_note, detail))
    if N is not None:
        qb = quotient_breaks(N)
        ok = set(qb.values()) == {int(u) for u in data.upper_breaks}
        checks.append(Check(
            "quotient_breaks_are_upper_breaks", ok,
            f"quotient breaks {sorted(set(qb.values()))}, upper breaks {[str(u) for u in data.upper_breaks]}",
        ))
        same = all(compute_filtration(N, alt) == data for alt in alternative_uniformizers(N, seed))
        checks.append(Check("uniformizer_invariance", same, "recomputed with two other uniformizers"))
    return checks
