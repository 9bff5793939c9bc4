"""Normal basis tests, the trace-valuation law and the rho_v construction."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .galois import (
    KUMMER,
    Check,
    ExtensionField,
    FixedField,
    GaloisVector,
    NElement,
    Subgroup,
    fixed_field,
    trace_to,
)
from .ramification import (
    RamificationData,
    StructuralError,
    check_hypothesis,
    compute_filtration,
    group_at,
    largest_break,
    t_sum,
)

GENERATOR = "generator"
NON_GENERATOR = "non_generator"
INCONCLUSIVE = "inconclusive"


class PreconditionError(ValueError):
    """Inputs violate the hypotheses of the operation."""


class InconclusiveError(RuntimeError):
    """A decision could not be reached within the precision cap."""


def _filtration(N: ExtensionField, data: RamificationData | None) -> RamificationData:
    if data is None:
        data = getattr(N, "_ramification", None)
        if data is None:
            data = compute_filtration(N)
            N._ramification = data
    return data


def pi_power(N: ExtensionField, j: int) -> NElement:
    """Cached ``pi_N^j`` for ``0 <= j``."""
    cache = N.__dict__.setdefault("_pi_powers", [N.one])
    while len(cache) <= j:
        cache.append(cache[-1] * N.uniformizer)
    return cache[j]


def element_of_valuation(N: ExtensionField, v: int) -> NElement:
    """``pi_N^j * pi_K^q`` with ``j = v mod p^n``."""
    j = v % N.degree
    return pi_power(N, j) * N.ground.pi_power((v - j) // N.degree)


def random_unit(N: ExtensionField, rng: random.Random, digits: int = 8) -> NElement:
    """``c_0 + sum c_j pi_N^j`` with ``c_0`` a random K-unit and ``c_j`` random integral."""
    K = N.ground
    u = N.from_k(K.random_element(0, rng, digits))
    for j in range(1, N.degree):
        u = u + pi_power(N, j) * K.random_integral(rng, digits)
    return u


def random_element(N: ExtensionField, v: int, rng: random.Random, digits: int = 8) -> NElement:
    """Random element of exact valuation ``v``."""
    y = element_of_valuation(N, v) * random_unit(N, rng, digits)
    y._val = v
    return y


# -- normal basis test -------------------------------------------------------

@dataclass
class NBVerdict:
    status: str
    det_valuation: int | None = None
    witness: dict = field(default_factory=dict)

    @property
    def is_generator(self) -> bool:
        return self.status == GENERATOR

    def to_json(self) -> dict:
        return {"status": self.status, "det_valuation": self.det_valuation, "witness": self.witness}


def conjugate_matrix(N: ExtensionField, rho: NElement):
    """Columns are the coordinates of ``sigma(rho)`` for sigma in G (sorted)."""
    cols = [N.act(s, rho).coords for s in N.group.elements()]
    return [[cols[j][i] for j in range(N.degree)] for i in range(N.degree)]


def nb_test(N: ExtensionField, rho: NElement) -> NBVerdict:
    """Decide whether the conjugates of ``rho`` form a K-basis of N.

    The determinant is exact, so "zero" is a proof: a kernel vector gives
    the K-linear relation among the conjugates.
    """
    if rho.is_zero():
        raise PreconditionError("rho = 0 generates nothing")
    K = N.ground
    M = conjugate_matrix(N, rho)
    det = linalg.det(M, K.zero, K.one)
    if not det.is_zero():
        return NBVerdict(GENERATOR, det.valuation, {"det_leading_digit": det.leading_digit})
    kernel = linalg.kernel_vector(M, K.one)
    relation = N.zero
    for c, s in zip(kernel, N.group.elements()):
        relation = relation + N.act(s, rho) * c
    if not relation.is_zero():
        raise StructuralError("kernel vector does not annihilate the conjugates")
    tr = N.trace(rho)
    return NBVerdict(NON_GENERATOR, None, {
        "relation": {"".join(map(str, s)): c.to_digit_string(8) for s, c in zip(N.group.elements(), kernel) if not c.is_zero()},
        "trace_zero": tr.is_zero(),
    })


# -- trace valuation law -----------------------------------------------------

@dataclass
class TraceLaw:
    v_rho: int
    v_trace: float
    t_G: int
    precondition: bool
    law_holds: bool | None

    def to_json(self) -> dict:
        return {
            "v_rho": self.v_rho,
            "v_trace": self.v_trace if self.v_trace != float("inf") else "inf",
            "t_G": self.t_G,
            "precondition": self.precondition,
            "law_holds": self.law_holds,
        }


def trace_valuation_forward(N: ExtensionField, rho: NElement, data: RamificationData | None = None) -> TraceLaw:
    """Compare ``v_N(Tr rho)`` with ``v_N(rho) + t_G``; asserted only in the b_max class."""
    data = _filtration(N, data)
    v = N.valuation(rho)
    tr = N.trace(rho)
    if not tr.in_ground():
        raise StructuralError("trace to K left K")
    v_tr = N.valuation(tr)
    pre = (v - data.b_max) % N.degree == 0
    holds = (v_tr == v + data.t_G) if pre else None
    return TraceLaw(v, v_tr, data.t_G, pre, holds)


@dataclass
class TraceSolution:
    rho: NElement
    steps: int
    precision: int
    tail_valuation: float


def solve_trace_detailed(
    N: ExtensionField,
    H: Subgroup | FixedField,
    alpha: NElement,
    target_v: int,
    data: RamificationData | None = None,
    precision: int | None = None,
) -> TraceSolution:
    """Find rho with ``Tr_H rho = alpha`` and ``v_N(rho) = target_v``.

    Digit by digit: at valuation w the candidate ``pi_N^j pi_K^q`` has trace
    of valuation ``w + t_H``, and its leading residue is matched.  After
    ``precision`` K-digits the remainder R (which lies in ``N^H``) is
    absorbed exactly by ``(R / Tr_H(pi_N^j)) pi_N^j``.
    """
    data = _filtration(N, data)
    if isinstance(H, FixedField):
        H = H.H
    if isinstance(alpha, NElement) and alpha.parent is not N:
        raise PreconditionError("alpha must be given as an element of N")
    if alpha.is_zero():
        raise PreconditionError("alpha = 0 has no valuation; the precondition cannot hold")
    for s in H.basis:
        if N.act(s, alpha) != alpha:
            raise PreconditionError("alpha is not fixed by H")
    precision = N.ground.precision if precision is None else precision
    d, p, K = N.degree, N.p, N.ground
    t_H = t_sum(data, H)
    v_alpha = N.valuation(alpha)
    if H.order == 1:
        if v_alpha != target_v:
            raise PreconditionError(f"v_N(alpha) = {v_alpha} but target is {target_v}")
        return TraceSolution(alpha, 0, precision, float("inf"))
    b_H = largest_break(data, H)
    if (target_v - b_H) % H.order:
        raise PreconditionError(f"target {target_v} is not congruent to {b_H} mod {H.order}")
    if v_alpha != target_v + t_H:
        raise PreconditionError(f"v_N(alpha) = {v_alpha} but target + t_H = {target_v + t_H}")

    traces: dict[int, NElement] = {}

    def trace_of_power(j):
        if j not in traces:
            T = trace_to(N, H, pi_power(N, j))
            if T.is_zero() or N.valuation(T) != j + t_H:
                raise StructuralError(f"Tr_H(pi_N^{j}) does not have valuation {j + t_H}")
            traces[j] = T
        return traces[j]

    limit = v_alpha + d * precision
    R = alpha
    rho = N.zero
    steps = 0
    while not R.is_zero():
        norm_R = N.norm(R)
        w_R = norm_R.valuation
        if w_R >= limit:
            break
        w = w_R - t_H
        if (w - b_H) % H.order:
            raise StructuralError(f"remainder valuation {w_R} is outside the trace image")
        j = w % d
        q = (w - j) // d
        T = trace_of_power(j)
        a = norm_R.leading_digit * pow(N.norm(T).leading_digit, -1, p) % p
        scale = K.pi_power(q) * a
        rho = rho + pi_power(N, j) * scale
        R = R - T * scale
        steps += 1
    tail_v = float("inf")
    if not R.is_zero():
        j = target_v % d
        tail = R * trace_of_power(j).inverse() * pi_power(N, j)
        tail_v = N.valuation(tail)
        rho = rho + tail
    if trace_to(N, H, rho) != alpha:
        raise StructuralError("solve_trace result does not have the requested trace")
    if N.valuation(rho) != target_v:
        raise StructuralError("solve_trace result has the wrong valuation")
    rho._val = target_v
    return TraceSolution(rho, steps, precision, tail_v)


def solve_trace(N, H, alpha, target_v, data=None, precision=None) -> NElement:
    return solve_trace_detailed(N, H, alpha, target_v, data, precision).rho


# -- relative trace congruence ------------------------------------------------

@dataclass
class CongruenceResult:
    b: int
    b_N_over_L: int
    v_L_of_trace: int
    congruence_holds: bool
    congruence_N_over_L: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def lemma3_residue(
    N: ExtensionField,
    H: Subgroup,
    rho: NElement,
    data: RamificationData | None = None,
    F: FixedField | None = None,
) -> CongruenceResult:
    """``v_L(Tr_{N/L} rho) mod p`` against the break b of L/K.

    b is the ramification break of the quotient ``L/K`` (it equals an
    upper break of N/K); the single break of N/L is reported alongside.
    """
    if N.n < 2:
        raise PreconditionError("N/K is cyclic; the congruence needs a noncyclic extension")
    if H.order * N.p != N.degree:
        raise PreconditionError("H must have index p")
    data = _filtration(N, data)
    v = N.valuation(rho)
    if (v - data.b_max) % N.degree:
        raise PreconditionError(f"v_N(rho) = {v} is not congruent to b_max = {data.b_max} mod {N.degree}")
    F = fixed_field(N, H) if F is None else F
    tr = trace_to(N, H, rho)
    v_L = F.L.valuation(F.section(tr))
    if N.valuation(tr) != H.order * v_L:
        raise StructuralError("v_N and v_L disagree on an element of L")
    b = compute_filtration(F.L).lower_breaks[0]
    b_NL = largest_break(data, H)
    p = N.p
    return CongruenceResult(b, b_NL, v_L, (v_L - b) % p == 0, (v_L - b_NL) % p == 0)


# -- rho_v ---------------------------------------------------------------------

@dataclass
class RhoVCertificate:
    v: int
    method: str
    a_v: int | None
    k: int | None
    r: int | None
    b_s: int | None
    H_k: Subgroup | None
    H_k1: Subgroup | None
    sigma: GaloisVector | None
    alpha: NElement | None
    beta: NElement | None
    rho_v: NElement
    edge_case: bool
    t_Hk: int | None
    steps: int
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self, digits: int = 8) -> dict:
        N = self.rho_v.parent
        enc = lambda y: None if y is None else N.coords_json(y, digits)  # noqa: E731
        return {
            "v": self.v,
            "method": self.method,
            "a_v": self.a_v,
            "k": self.k,
            "r": self.r,
            "b_s": self.b_s,
            "H_k": self.H_k.to_json() if self.H_k else None,
            "H_k+1": self.H_k1.to_json() if self.H_k1 else None,
            "sigma": list(self.sigma) if self.sigma is not None else None,
            "t_H_k": self.t_Hk,
            "edge_case_a_v_zero": self.edge_case,
            "alpha": enc(self.alpha),
            "beta": enc(self.beta),
            "rho_v": enc(self.rho_v),
            "solve_steps": self.steps,
            "checks": [c.to_json() for c in self.checks],
            "ok": self.ok,
        }


def _extend_basis(p: int, n: int, base: Sequence[Sequence[int]], pool: Sequence[GaloisVector], rank: int):
    """Echelon basis of ``base`` extended by the lexicographically first pool elements."""
    rows = list(linalg.fp_rref(base, p))
    added = []
    for s in pool:
        if len(rows) >= rank:
            break
        if len(linalg.fp_rref(rows + [s], p)) > len(rows):
            rows.append(s)
            added.append(s)
    if len(rows) != rank:
        raise StructuralError("could not extend the subgroup to the required order")
    return Subgroup(p, n, rows), added


def radical_witness(N: ExtensionField, v: int) -> RhoVCertificate:
    """``x^i pi_K^q`` of valuation v in a degree-p Kummer layer ``x^p = u``, ``p`` not dividing v(u)."""
    p = N.p
    vu = N.layers[0].datum.valuation
    x = N.gen(0)
    i = v * pow(vu, -1, p) % p
    q = (v - i * vu) // p
    rho = x ** i * N.ground.pi_power(q)
    verdict = nb_test(N, rho)
    checks = [
        Check("valuation", N.valuation(rho) == v, f"v_N(rho) = {N.valuation(rho)}"),
        Check("non_generator", verdict.status == NON_GENERATOR, verdict.status),
    ]
    tr = N.trace(rho)
    if i % p:
        checks.append(Check("trace_zero", tr.is_zero(), "Tr(x^i) = 0 for p not dividing i"))
    else:
        fixed = all(N.act(s, rho) == rho for s in N.group.basis)
        checks.append(Check("fixed_by_G", fixed, "rho lies in K, so its conjugates coincide"))
    return RhoVCertificate(v, "radical", None, None, None, None, None, None, None, None, None,
                           rho, False, None, 0, checks)


def construct_rho_v(
    N: ExtensionField,
    v: int,
    data: RamificationData | None = None,
    precision: int | None = None,
    alpha_unit: NElement | None = None,
) -> RhoVCertificate:
    """Trace-zero element of valuation ``v`` for ``v`` outside the b_max class.

    Outside the theorem's hypothesis the only supported family is a single
    Kummer layer with ``p`` not dividing ``v(u)``, where ``x^i pi_K^q`` is
    returned as a radical witness.
    """
    data = _filtration(N, data)
    p, n, d = N.p, N.n, N.degree
    if not check_hypothesis(data).ok:
        if n == 1 and N.kind == KUMMER and N.layers[0].datum.valuation % p:
            return radical_witness(N, v)
        raise PreconditionError("upper breaks are not all prime to p")
    bm = data.b_max
    a_v = v * pow(bm, -1, d) % d
    if a_v == 1:
        raise PreconditionError(f"v = {v} is congruent to b_max = {bm} mod {d}: normal basis class")
    k = 0
    while k + 1 < n and (a_v - 1) % p ** (k + 1) == 0:
        k += 1
    r = ((a_v - 1) % p ** (k + 1)) // p ** k
    edge = a_v == 0
    # Hilbert break with g_{b_s + 1} < p^{k+1} <= g_{b_s}
    orders_after = data.orders[1:] + (1,)
    s = next(i for i, (g, g_next) in enumerate(zip(data.orders, orders_after)) if g_next < p ** (k + 1) <= g)
    b_s = data.lower_breaks[s]
    G_top = group_at(data, b_s)
    G_next = group_at(data, b_s + 1)
    pool = [e for e in G_top.elements() if any(e)]
    H_k, _ = _extend_basis(p, n, G_next.basis, pool, k)
    H_k1, added = _extend_basis(p, n, H_k.basis, pool, k + 1)
    sigma = added[-1]
    if not (G_next <= H_k <= H_k1 <= G_top):
        raise StructuralError("subgroup chain violates G_{b_s+1} <= H_k <= H_{k+1} <= G_{b_s}")
    t_Hk = t_sum(data, H_k)
    target = v + t_Hk - r * p ** k * b_s
    if target % p ** k:
        raise StructuralError(f"v_N(alpha) = {target} is not divisible by p^k")
    F = fixed_field(N, H_k)
    e = target // p ** k
    j = e % F.degree
    alpha = F.embed(F.L.uniformizer ** j) * N.ground.pi_power((e - j) // F.degree)
    if alpha_unit is not None:
        alpha = alpha * alpha_unit
    if N.valuation(alpha) != target:
        raise StructuralError("alpha has the wrong valuation")
    beta = alpha
    for _ in range(r):
        beta = N.act(sigma, beta) - beta
    if beta.is_zero() or N.valuation(beta) != v + t_Hk:
        raise StructuralError(f"(sigma - 1)^r alpha does not have valuation {v + t_Hk}")
    sol = solve_trace_detailed(N, H_k, beta, v, data, precision)
    rho = sol.rho
    verdict = nb_test(N, rho)
    checks = [
        Check("valuation", N.valuation(rho) == v, f"v_N(rho_v) = {N.valuation(rho)}"),
        Check("trace_zero", N.trace(rho).is_zero(), "Tr_{N/K}(rho_v) computed exactly"),
        Check("non_generator", verdict.status == NON_GENERATOR, verdict.status),
        Check("order_condition", G_next.order < p ** (k + 1) <= G_top.order,
              f"g_(b_s+1) = {G_next.order}, p^(k+1) = {p ** (k + 1)}, g_(b_s) = {G_top.order}"),
    ]
    cert = RhoVCertificate(v, "proof", a_v, k, r, b_s, H_k, H_k1, sigma, alpha, beta, rho, edge,
                           t_Hk, sol.steps, checks)
    if not cert.ok:
        raise StructuralError(f"rho_v certificate failed: {cert.to_json()}")
    return cert


# -- sweeps ------------------------------------------------------------------

@dataclass
class SweepReport:
    residue: int
    trials: int
    tallies: dict
    expected: str | None
    violations: list[int]
    non_generator_trials: list[int]

    @property
    def ok(self) -> bool:
        return not self.violations and self.tallies.get(INCONCLUSIVE, 0) == 0

    def to_json(self) -> dict:
        return {
            "residue": self.residue,
            "trials": self.trials,
            "tallies": dict(sorted(self.tallies.items())),
            "expected": self.expected,
            "violations": self.violations,
            "non_generator_trials": self.non_generator_trials,
        }


def sample_class(N: ExtensionField, residue: int, seed, index: int, digits: int = 8) -> NElement:
    """The element used by trial ``index`` of a sweep; independent of other trials."""
    rng = random.Random(f"{seed}:{residue}:{index}")
    v = residue % N.degree + N.degree * rng.randrange(-2, 3)
    return random_element(N, v, rng, digits)


def sweep_class(
    N: ExtensionField,
    residue_v: int,
    trials: int,
    seed,
    data: RamificationData | None = None,
    digits: int = 8,
) -> SweepReport:
    """nb_test on ``trials`` random elements with ``v_N = residue_v mod p^n``."""
    data = _filtration(N, data)
    expected = None
    if check_hypothesis(data).ok and (residue_v - data.b_max) % N.degree == 0:
        expected = GENERATOR
    tallies = {GENERATOR: 0, NON_GENERATOR: 0, INCONCLUSIVE: 0}
    violations, non_gen = [], []
    for i in range(trials):
        rho = sample_class(N, residue_v, seed, i, digits)
        status = nb_test(N, rho).status
        tallies[status] += 1
        if status == NON_GENERATOR:
            non_gen.append(i)
        if expected is not None and status != expected:
            violations.append(i)
    return SweepReport(residue_v % N.degree, trials, tallies, expected, violations, non_gen)
