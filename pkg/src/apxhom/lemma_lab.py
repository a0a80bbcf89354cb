"""Checkers and constructions for the sumset lemmas behind the agreement bounds.

Every inequality is evaluated on exact integers: rationals are compared by
clearing denominators, never through floats.  Checkers return report objects
with a ``holds`` flag rather than raising, so randomized suites can collect
violations; precondition failures raise :class:`LemmaError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import group_core as gc
from .group_core import GroupElement, GroupSpec
from .setops import (
    ElementSet,
    additive_energy,
    difference,
    dilate,
    negate,
    sumset,
    sumset_many,
    triple_correlation,
)

BSG_C = Fraction(1, 18)
PETRIDIS_MAX = 14


class LemmaError(ValueError):
    """A checker was called with inputs violating its preconditions."""


class BsgConsistencyError(RuntimeError):
    """No x in S satisfies both selection conditions (should be impossible)."""

    def __init__(self, message: str, dump: dict[str, Any]):
        super().__init__(message)
        self.dump = dump


def _projection(Gamma: ElementSet, lo: int, hi: int) -> list[GroupElement]:
    return [x[lo:hi] for x in Gamma.elements()]


def projections_injective(Gamma: ElementSet, G: GroupSpec) -> bool:
    k = len(G)
    pg = _projection(Gamma, 0, k)
    ph = _projection(Gamma, k, len(Gamma.spec))
    return len(set(pg)) == len(pg) and len(set(ph)) == len(ph)


# --- Claim A -----------------------------------------------------------------

@dataclass(frozen=True)
class ClaimAReport:
    r: int
    size_X: int
    size_B: int
    size_sumset: int          # |X + r.B|
    size_dilate_B: int        # |r.B|
    kernel_H: int             # |K_{H,r}|
    dilate_G: int             # |r.G|
    energy: int               # |Q|
    psi_checked: bool = False
    psi_ok: bool = True

    @property
    def lhs(self) -> Fraction:
        return Fraction(self.size_sumset, self.size_X)

    @property
    def rhs(self) -> Fraction:
        return Fraction(self.size_B, self.kernel_H * self.dilate_G)

    @property
    def energy_bound(self) -> int:
        return self.size_X * self.size_dilate_B * self.dilate_G

    @property
    def growth_holds(self) -> bool:
        # |X + r.B| / |X| >= |B| / (|K_H,r| |r.G|), cross-multiplied
        return self.size_sumset * self.kernel_H * self.dilate_G >= self.size_B * self.size_X

    @property
    def energy_holds(self) -> bool:
        return self.energy <= self.energy_bound

    @property
    def cauchy_schwarz_holds(self) -> bool:
        # |Q| >= |X|^2 |r.B|^2 / |X + r.B|
        return self.energy * self.size_sumset >= (self.size_X * self.size_dilate_B) ** 2

    @property
    def holds(self) -> bool:
        return self.growth_holds and self.energy_holds and self.cauchy_schwarz_holds and self.psi_ok


def _psi_is_injective(X: ElementSet, rB: ElementSet, G: GroupSpec, r: int) -> bool:
    """Enumerate Q and check psi(x,y,z,w) = (x, y, pi_G(z) - pi_G(x)) is injective into X x rB x rG."""
    k = len(G)
    xs, ys = X.elements(), rB.elements()
    spec = X.spec
    by_sum: dict[GroupElement, list[tuple[GroupElement, GroupElement]]] = {}
    for z in xs:
        for w in ys:
            by_sum.setdefault(gc.add(spec, z, w), []).append((z, w))
    rG = set(gc.dilate_image(G, r).elements())
    seen = set()
    for x in xs:
        for y in ys:
            for z, _w in by_sum[gc.add(spec, x, y)]:
                third = gc.sub(G, z[:k], x[:k])
                if third not in rG:
                    return False
                img = (x, y, third)
                if img in seen:
                    return False
                seen.add(img)
    return True


def claim_a_check(Gamma: ElementSet, X: ElementSet, B: ElementSet, r: int,
                  G: GroupSpec, H: GroupSpec, verify_psi: bool = False) -> ClaimAReport:
    """Check |X + r.B|/|X| >= |B|/(|K_{H,r}| |r.G|) and the energy bound behind it.

    ``Gamma`` lives in G x H and must have injective coordinate projections;
    X and B are nonempty subsets of Gamma.  With ``verify_psi`` the quadruple
    set Q is enumerated and the injection psi from the argument is checked
    explicitly, otherwise |Q| is counted through the sum histogram.
    """
    G.require_finite()
    if Gamma.spec != gc.direct_product(G, H):
        raise LemmaError(f"Gamma lives in {Gamma.spec}, expected {gc.direct_product(G, H)}")
    if r < 1:
        raise LemmaError(f"r must be positive, got {r}")
    if not projections_injective(Gamma, G):
        raise LemmaError("coordinate projections restricted to Gamma are not injective")
    if len(X) == 0 or len(B) == 0:
        raise LemmaError("X and B must be nonempty")
    if not (X.issubset(Gamma) and B.issubset(Gamma)):
        raise LemmaError("X and B must be subsets of Gamma")
    rB = dilate(r, B)
    psi_ok = _psi_is_injective(X, rB, G, r) if verify_psi else True
    return ClaimAReport(
        r=r,
        size_X=len(X),
        size_B=len(B),
        size_sumset=len(sumset(X, rB)),
        size_dilate_B=len(rB),
        kernel_H=gc.kernel_size(H, r),
        dilate_G=gc.dilate_size(G, r),
        energy=additive_energy(X, rB),
        psi_checked=verify_psi,
        psi_ok=psi_ok,
    )


# --- Bukh-type dilation bound -------------------------------------------------

@dataclass(frozen=True)
class BukhReport:
    r: int
    K: Fraction
    size_X_plus_A: int
    size_X_plus_rA: int
    binary_digits: tuple[int, ...]
    partial_sizes: tuple[int, ...]   # |X + sum_{i<=j} 2^i.A| for j = 0..k
    digit_size: int                  # |X + sum eps_i 2^i.A|

    @property
    def k(self) -> int:
        return len(self.binary_digits) - 1

    @property
    def conclusion_holds(self) -> bool:
        return self.size_X_plus_rA <= self.K ** self.k * self.size_X_plus_A

    @property
    def chain_holds(self) -> bool:
        full = self.partial_sizes[-1]
        induction = all(s <= self.K ** j * self.size_X_plus_A for j, s in enumerate(self.partial_sizes))
        return self.size_X_plus_rA <= self.digit_size <= full and induction

    @property
    def holds(self) -> bool:
        return self.conclusion_holds and self.chain_holds


def minus_A_minus_2A(A: ElementSet) -> ElementSet:
    """-A - 2.A"""
    return negate(sumset(A, dilate(2, A)))


def bukh_check(A: ElementSet, X: ElementSet, Y: ElementSet, r: int) -> BukhReport:
    """Check |X + r.A| <= K^floor(log2 r) |X + A| with K = |Y - A - 2.A| / |Y|.

    Also records the binary-digit chain |X + r.A| <= |X + sum eps_i 2^i.A|
    <= |X + sum 2^i.A| and the inductive bounds on each partial sum.
    """
    if len(Y) == 0:
        raise LemmaError("Y must be nonempty")
    if not Y.issubset(A):
        raise LemmaError("Y must be a subset of A")
    if r < 1:
        raise LemmaError(f"r must be positive, got {r}")
    W = minus_A_minus_2A(A)
    K = Fraction(len(sumset(Y, W)), len(Y))
    digits = tuple(int(b) for b in reversed(bin(r)[2:]))
    partial = X
    digit_sum = X
    partial_sizes = []
    for i, eps in enumerate(digits):
        term = dilate(2**i, A)
        partial = sumset(partial, term)
        partial_sizes.append(len(partial))
        if eps:
            digit_sum = sumset(digit_sum, term)
    return BukhReport(
        r=r,
        K=K,
        size_X_plus_A=len(sumset(X, A)),
        size_X_plus_rA=len(sumset(X, dilate(r, A))),
        binary_digits=digits,
        partial_sizes=tuple(partial_sizes),
        digit_size=len(digit_sum),
    )


# --- Petridis minimiser -----------------------------------------------------

@dataclass(frozen=True)
class PetridisResult:
    Z: ElementSet
    size_Z_plus_W: int     # |Z - A - 2.A|

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.size_Z_plus_W, len(self.Z))


def petridis_minimizer(Y: ElementSet, A: ElementSet) -> PetridisResult:
    """Nonempty Z in Y minimising |Z - A - 2.A| / |Z|, by exhaustion.

    Ties go to the smaller |Z|, then to the lexicographically first subset
    in the element order of Y.
    """
    n = len(Y)
    if n == 0:
        raise LemmaError("Y must be nonempty")
    if n > PETRIDIS_MAX:
        raise LemmaError(f"|Y| = {n} exceeds the exhaustive limit {PETRIDIS_MAX}")
    W = minus_A_minus_2A(A)
    ys = Y.elements()
    # each translate y + W as a bitmask over the union of all translates
    translates = [sumset(ElementSet.from_elements(Y.spec, [y], Y.storage), W).elements() for y in ys]
    index: dict[GroupElement, int] = {}
    for t in translates:
        for e in t:
            index.setdefault(e, len(index))
    masks = [sum(1 << index[e] for e in t) for t in translates]
    union = [0] * (1 << n)
    best_key = None
    best_subset = 0
    for s in range(1, 1 << n):
        low = s & -s
        union[s] = union[s ^ low] | masks[low.bit_length() - 1]
        size, card = union[s].bit_count(), s.bit_count()
        members = tuple(i for i in range(n) if s >> i & 1)
        key = (Fraction(size, card), card, members)
        if best_key is None or key < best_key:
            best_key, best_subset = key, s
    Z = ElementSet.from_elements(Y.spec, [ys[i] for i in range(n) if best_subset >> i & 1], Y.storage)
    return PetridisResult(Z, union[best_subset].bit_count())


def petridis_check(Z: ElementSet, A: ElementSet, C: ElementSet) -> bool:
    """|Z - A - 2.A + C| <= (|Z - A - 2.A| / |Z|) |Z + C|, cross-multiplied."""
    ZW = sumset(Z, minus_A_minus_2A(A))
    return len(Z) * len(sumset(ZW, C)) <= len(ZW) * len(sumset(Z, C))


# --- kernel / quotient identity ----------------------------------------------

@dataclass(frozen=True)
class KernelQuotientReport:
    k: int
    dilated_size: int        # |2^(k-1).(Z - A - 2.A)|
    coset_union_size: int    # |Z - A - 2.A + K|
    kernel_size: int         # |K|
    dilated_Z: int           # |2^(k-1).Z|
    Z_plus_kernel: int       # |Z + K|

    @property
    def holds(self) -> bool:
        return (self.dilated_size * self.kernel_size == self.coset_union_size
                and self.dilated_Z * self.kernel_size == self.Z_plus_kernel)


def kernel_quotient_identity_check(Z: ElementSet, A: ElementSet, k: int) -> KernelQuotientReport:
    """|m.W| = |W + K_{G,m}| / |K_{G,m}| for W = Z - A - 2.A and m = 2^(k-1)."""
    if k < 1:
        raise LemmaError(f"k must be positive, got {k}")
    Z.spec.require_finite()
    m = 2 ** (k - 1)
    W = sumset(Z, minus_A_minus_2A(A))
    ker = gc.kernel_subgroup(Z.spec, m)
    if ker.storage != Z.storage:
        ker = ker.to_dense() if Z.storage == "dense" else ker.to_sparse()
    return KernelQuotientReport(
        k=k,
        dilated_size=len(dilate(m, W)),
        coset_union_size=len(sumset(W, ker)),
        kernel_size=len(ker),
        dilated_Z=len(dilate(m, Z)),
        Z_plus_kernel=len(sumset(Z, ker)),
    )


# --- Ruzsa triangle inequality ----------------------------------------------

@dataclass(frozen=True)
class RuzsaReport:
    size_U_plus_W: int
    size_U_plus_V: int
    size_negV_plus_W: int
    size_V: int

    @property
    def holds(self) -> bool:
        return self.size_V * self.size_U_plus_W <= self.size_U_plus_V * self.size_negV_plus_W


def ruzsa_triangle_check(U: ElementSet, V: ElementSet, W: ElementSet) -> RuzsaReport:
    """|V| |U + W| <= |U + V| |-V + W|."""
    if len(V) == 0:
        raise LemmaError("V must be nonempty")
    return RuzsaReport(len(sumset(U, W)), len(sumset(U, V)), len(sumset(negate(V), W)), len(V))


# --- symmetric Balog-Szemeredi-Gowers construction -------------------------------

@dataclass
class BsgTrace:
    chosen_x: GroupElement
    elements: list[GroupElement]     # S in rank order; indexes p_counts
    p_counts: np.ndarray             # |S| * p(y, z) for y, z in S
    R_size: int
    c: Fraction = BSG_C

    def p(self, y: GroupElement, z: GroupElement) -> Fraction:
        pos = {e: i for i, e in enumerate(self.elements)}
        if y not in pos or z not in pos:
            return Fraction(0)
        return Fraction(int(self.p_counts[pos[y], pos[z]]), len(self.elements))

    @property
    def p_table(self) -> dict[tuple[GroupElement, GroupElement], Fraction]:
        n = len(self.elements)
        return {(y, z): Fraction(int(self.p_counts[i, j]), n)
                for i, y in enumerate(self.elements) for j, z in enumerate(self.elements)}


@dataclass
class BsgOutput:
    T: ElementSet
    x0: GroupElement
    U_size: int
    epsilon: Fraction
    certified: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.certified.values())


def bsg_symmetric(S: ElementSet) -> tuple[BsgOutput, BsgTrace]:
    """Extract T in S and x0 with x0 - T = T and |T - T| controlled.

    With eps = (#{(a,b) in S^2 : a+b in S}) / |S|^2 and c = 1/18, scan x in S
    in rank order and keep the first with U = S & (x - S) satisfying
    |U| >= eps |S| / sqrt(2) and at least (1 - 2c)|U|^2 pairs (y, z) in U^2
    with p(y, z) > c eps^2.  Then R keeps the y in U with at least
    (1 - 6c)|U| such partners z, and T = R & (x - R).
    """
    spec = S.spec
    spec.require_finite()
    n = len(S)
    if n == 0:
        raise LemmaError("S must be nonempty")
    triples = triple_correlation(S)
    eps = Fraction(triples, n * n)
    if eps == 0:
        raise LemmaError("S has no additive triples (eps = 0)")
    num, den = eps.numerator, eps.denominator
    cn, cd = BSG_C.numerator, BSG_C.denominator

    dense = S.to_dense()
    mask = dense.mask
    ranks = dense.ranks()
    elems = dense.elements()
    neg_ranks = spec.scale_ranks(-1, ranks)
    # in_shift[i, j]: s_j - s_i in S, i.e. s_j in s_i + S
    in_shift = mask[spec.add_ranks(ranks[None, :], neg_ranks[:, None])].astype(np.int64)
    # |(y + S) & S & (z + S)| for y = s_i, z = s_j
    p_counts = in_shift @ in_shift.T
    # p(y,z) > c eps^2  <=>  cd * count * den^2 > cn * num^2 * |S|
    good = cd * p_counts * den**2 > cn * num**2 * n
    good_i = good.astype(np.int64)
    # in_U[i, j]: s_i - s_j in S, i.e. s_j in U for x = s_i
    in_U = mask[spec.add_ranks(ranks[:, None], neg_ranks[None, :])]

    chosen = None
    for i in range(n):
        u = in_U[i]
        u_size = int(u.sum())
        big_enough = 2 * u_size**2 * den**2 >= num**2 * n**2
        if not big_enough:
            continue
        ui = u.astype(np.int64)
        good_pairs = int(ui @ good_i @ ui)
        # good_pairs >= (1 - 2c)|U|^2
        if good_pairs * cd >= (cd - 2 * cn) * u_size**2:
            chosen = i
            break
    if chosen is None:
        raise BsgConsistencyError(
            "no x in S meets both selection conditions",
            {"spec": str(spec), "S": elems, "epsilon": str(eps),
             "U_sizes": [int(in_U[i].sum()) for i in range(n)]},
        )

    x = elems[chosen]
    u = in_U[chosen]
    u_size = int(u.sum())
    partners = good_i @ u.astype(np.int64)
    # y in R  <=>  partners(y) >= (1 - 6c)|U|
    in_R = u & (partners * cd >= (cd - 6 * cn) * u_size)
    R = ElementSet.from_ranks(spec, ranks[in_R])
    x_minus_R = sumset(ElementSet.from_elements(spec, [x]), negate(R))
    T = R.intersection(x_minus_R)
    if S.storage == "sparse":
        T = T.to_sparse()

    TT = len(difference(T, T))
    t, r_size = len(T), len(R)
    x_minus_T = sumset(ElementSet.from_elements(spec, [x], T.storage), negate(T))
    certified = {
        "x0_minus_T_equals_T": x_minus_T == T,
        "T_subset_S": T.issubset(S),
        "T_at_least_third_U": 3 * t >= u_size,
        "U_large": 2 * u_size**2 * den**2 >= num**2 * n**2,
        "R_at_least_two_thirds_U": 3 * r_size >= 2 * u_size,
        # |T-T| |U| (c eps^2)^2 |S|^2 <= 3 |S|^4
        "difference_bound": TT * u_size * cn**2 * num**4 * n**2 <= 3 * cd**2 * den**4 * n**4,
    }
    out = BsgOutput(T=T, x0=x, U_size=u_size, epsilon=eps, certified=certified)
    trace = BsgTrace(chosen_x=x, elements=elems, p_counts=p_counts, R_size=r_size)
    return out, trace


# --- the (Z/4Z)^d x Z family -----------------------------------------------------

COUNTEREXAMPLE_MAX_D = 8


@dataclass(frozen=True)
class CounterexampleStats:
    d: int
    size_A: int
    size_2A: int
    size_A_plus_B: int
    size_2A_plus_2B: int

    @property
    def ratio_sum(self) -> Fraction:
        return Fraction(self.size_A_plus_B, self.size_A)

    @property
    def ratio_dilated(self) -> Fraction:
        return Fraction(self.size_2A_plus_2B, self.size_2A)

    def closed_forms(self) -> tuple[int, int, int, int]:
        d = self.d
        return 4**d + 2**d, 2 * 2**d, 2 * 4**d, 2 ** (2 * d) + 2**d

    @property
    def holds(self) -> bool:
        sizes = (self.size_A, self.size_2A, self.size_A_plus_B, self.size_2A_plus_2B)
        return (sizes == self.closed_forms() and self.ratio_sum <= 2
                and self.ratio_dilated >= Fraction(2**self.d, 2))

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "A": self.size_A,
            "2.A": self.size_2A,
            "A+B": self.size_A_plus_B,
            "2.A+2.B": self.size_2A_plus_2B,
            "ratio_sum": f"{self.ratio_sum.numerator}/{self.ratio_sum.denominator}",
            "ratio_dilated": f"{self.ratio_dilated.numerator}/{self.ratio_dilated.denominator}",
            "closed_forms_match": self.holds,
        }


def counterexample_sets(d: int) -> tuple[ElementSet, ElementSet]:
    """A = (Z/4)^d x {0}  u  {0}^d x {1..2^d},  B = {0,1}^d x {0}  in (Z/4Z)^d x Z."""
    if d < 0:
        raise LemmaError(f"d must be nonnegative, got {d}")
    if d > COUNTEREXAMPLE_MAX_D:
        raise LemmaError(f"d = {d} exceeds the limit {COUNTEREXAMPLE_MAX_D}")
    spec = GroupSpec([4] * d + [0])
    cube = GroupSpec([4] * d)
    A = [x + (0,) for x in cube.elements()] + [(0,) * d + (t,) for t in range(1, 2**d + 1)]
    B = [x + (0,) for x in GroupSpec([2] * d).elements()]
    return ElementSet.from_elements(spec, A), ElementSet.from_elements(spec, B)


def counterexample_family(d: int) -> CounterexampleStats:
    A, B = counterexample_sets(d)
    A2, B2 = dilate(2, A), dilate(2, B)
    return CounterexampleStats(
        d=d,
        size_A=len(A),
        size_2A=len(A2),
        size_A_plus_B=len(sumset(A, B)),
        size_2A_plus_2B=len(sumset_many(A2, B2)),
    )
