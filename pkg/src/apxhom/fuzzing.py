"""Random instance generators and the trial loop behind ``apxhom fuzz``.

Trial ``i`` of a campaign with seed ``s`` draws from the generator seeded with
``(s, i)``, so any trial can be replayed on its own and results do not depend
on how trials are spread over workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterator

import numpy as np
from sympy import nextprime

from . import group_core as gc
from . import lemma_lab as lab
from .group_core import GroupSpec
from .maps import binary_embedding, centered_unwrap, graph_of, random_injection
from .serialize import render_spec, set_to_json
from .setops import ElementSet, sumset, triple_correlation

_FACTORS = (2, 3, 4, 5, 6, 7, 8, 9, 11, 13, 16)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def random_spec(rng: np.random.Generator, max_order: int, min_order: int = 1) -> GroupSpec:
    """A random finite spec with min_order <= order <= max_order."""
    for _ in range(1000):
        mods: list[int] = []
        order = 1
        while True:
            choices = [m for m in _FACTORS if order * m <= max_order]
            if not choices or (mods and rng.random() < 0.35):
                break
            m = int(rng.choice(choices))
            mods.append(m)
            order *= m
        if order >= min_order:
            return GroupSpec(mods)
    raise ValueError(f"could not draw a spec with order in [{min_order}, {max_order}]")


def random_subset(rng: np.random.Generator, pool: ElementSet, lo: int, hi: int) -> ElementSet:
    """Uniform random subset of ``pool`` with size drawn from [lo, min(hi, |pool|)]."""
    ranks = pool.ranks()
    k = int(rng.integers(lo, min(hi, len(ranks)) + 1))
    return ElementSet.from_ranks(pool.spec, rng.choice(ranks, size=k, replace=False), pool.storage)


def random_set(rng: np.random.Generator, spec: GroupSpec, lo: int, hi: int) -> ElementSet:
    n = spec.order()
    k = int(rng.integers(lo, min(hi, n) + 1))
    return ElementSet.from_ranks(spec, rng.choice(n, size=k, replace=False))


# --- per-checker trials --------------------------------------------------------

@dataclass
class Trial:
    ok: bool
    info: dict[str, Any]
    inputs: dict[str, Any]


def claim_a_trial(rng: np.random.Generator, max_G: int = 64, max_H: int = 128,
                  r_choices: tuple[int, ...] = (2, 3, 4, 5)) -> Trial:
    G = random_spec(rng, max_G)
    H = random_spec(rng, max_H, min_order=G.order())
    f = random_injection(G, H, rng)
    Gamma = graph_of(f)
    X = random_subset(rng, Gamma, 1, len(Gamma))
    B = random_subset(rng, Gamma, 1, len(Gamma))
    r = int(rng.choice(r_choices))
    rep = lab.claim_a_check(Gamma, X, B, r, G, H)
    return Trial(
        rep.growth_holds and rep.energy_holds and rep.cauchy_schwarz_holds,
        {"r": r, "lhs": str(rep.lhs), "rhs": str(rep.rhs), "energy": rep.energy, "energy_bound": rep.energy_bound},
        {"G": render_spec(G), "H": render_spec(H), "Gamma": set_to_json(Gamma),
         "X": set_to_json(X), "B": set_to_json(B), "r": r},
    )


def bukh_trial(rng: np.random.Generator, max_order: int = 256, max_size: int = 12,
               r_choices: tuple[int, ...] = tuple(range(2, 10))) -> Trial:
    spec = random_spec(rng, max_order)
    A = random_set(rng, spec, 1, max_size)
    X = random_set(rng, spec, 1, max_size)
    r = int(rng.choice(r_choices))
    rep = lab.bukh_check(A, X, A, r)
    return Trial(
        rep.holds,
        {"r": r, "K": str(rep.K), "X+rA": rep.size_X_plus_rA, "X+A": rep.size_X_plus_A},
        {"spec": render_spec(spec), "A": set_to_json(A), "X": set_to_json(X), "r": r},
    )


def ruzsa_trial(rng: np.random.Generator, spec: GroupSpec = GroupSpec([64, 4]), size: int = 8) -> Trial:
    U, V, W = (random_set(rng, spec, size, size) for _ in range(3))
    rep = lab.ruzsa_triangle_check(U, V, W)
    return Trial(rep.holds, {"V": rep.size_V, "U+W": rep.size_U_plus_W},
                 {"U": set_to_json(U), "V": set_to_json(V), "W": set_to_json(W)})


def petridis_trial(rng: np.random.Generator, max_order: int = 128, max_Y: int = 12,
                   n_C: int = 100, max_C: int = 8) -> Trial:
    spec = random_spec(rng, max_order)
    A = random_set(rng, spec, 1, max_Y)
    res = lab.petridis_minimizer(A, A)
    bad = []
    for j in range(n_C):
        C = random_set(rng, spec, 1, max_C)
        if not lab.petridis_check(res.Z, A, C):
            bad.append(set_to_json(C))
    return Trial(not bad, {"ratio": str(res.ratio), "Z": len(res.Z), "violating_C": len(bad)},
                 {"spec": render_spec(spec), "A": set_to_json(A), "bad_C": bad})


def kernel_quotient_trial(rng: np.random.Generator, max_order: int = 256) -> Trial:
    spec = random_spec(rng, max_order)
    A = random_set(rng, spec, 1, 10)
    Z = random_subset(rng, A, 1, len(A))
    k = int(rng.integers(1, 5))
    rep = lab.kernel_quotient_identity_check(Z, A, k)
    return Trial(rep.holds, {"k": k, "lhs": rep.dilated_size, "kernel": rep.kernel_size},
                 {"spec": render_spec(spec), "A": set_to_json(A), "Z": set_to_json(Z), "k": k})


def bsg_trial(rng: np.random.Generator, max_size: int = 64) -> Trial:
    label, S = random_bsg_set(rng, max_size)
    try:
        out, trace = lab.bsg_symmetric(S)
    except lab.BsgConsistencyError as exc:
        return Trial(False, {"kind": label, "abort": str(exc), "dump": repr(exc.dump)}, {"S": set_to_json(S)})
    return Trial(out.ok, {"kind": label, "eps": str(out.epsilon), "T": len(out.T), "U": out.U_size,
                          "certified": out.certified}, {"S": set_to_json(S)})


# --- the BSG corpus --------------------------------------------------------------

def _subgroup_generated(spec: GroupSpec, gens: list[tuple[int, ...]]) -> ElementSet:
    H = ElementSet.from_elements(spec, [spec.identity()])
    for g in gens:
        step = ElementSet.from_elements(spec, [spec.identity(), g])
        while True:
            nxt = sumset(H, step)
            if nxt == H:
                break
            H = nxt
    return H


def random_bsg_set(rng: np.random.Generator, max_size: int = 64) -> tuple[str, ElementSet]:
    """One set from the mixed corpus: random sets, subgroups, coset unions, graphs."""
    kind = ("random", "subgroup", "cosets", "graph")[int(rng.integers(4))]
    for _ in range(100):
        if kind == "random":
            spec = random_spec(rng, 512, min_order=4)
            S = random_set(rng, spec, 2, max_size)
        elif kind == "subgroup":
            spec = random_spec(rng, 256, min_order=2)
            gens = [gc.unrank(spec, int(k)) for k in rng.integers(spec.order(), size=int(rng.integers(1, 3)))]
            S = _subgroup_generated(spec, gens)
        elif kind == "cosets":
            spec = random_spec(rng, 256, min_order=4)
            sub = _subgroup_generated(spec, [gc.unrank(spec, int(rng.integers(spec.order())))])
            shifts = random_set(rng, spec, 1, 4)
            S = sumset(sub, shifts)
        else:
            which = int(rng.integers(3))
            if which == 0:
                n = int(rng.integers(1, 7))
                S = graph_of(binary_embedding(n, int(nextprime(2**n))))
            elif which == 1:
                p = int(rng.choice([3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61]))
                S = graph_of(centered_unwrap(p, int(nextprime(p))))
            else:
                G = random_spec(rng, max_size)
                H = random_spec(rng, 128, min_order=G.order())
                S = graph_of(random_injection(G, H, rng))
        if 0 < len(S) <= max_size and triple_correlation(S) > 0:
            return kind, S
    raise RuntimeError(f"could not draw a {kind} set with positive triple count")


CHECKERS: dict[str, Callable[[np.random.Generator], Trial]] = {
    "claim_a": claim_a_trial,
    "bukh": bukh_trial,
    "ruzsa": ruzsa_trial,
    "petridis": petridis_trial,
    "kernel_quotient": kernel_quotient_trial,
    "bsg": bsg_trial,
}


def run_trials(checker: str, trials: int, seed: int = 0, **kwargs) -> Iterator[tuple[int, Trial]]:
    fn = CHECKERS[checker]
    for i in range(trials):
        yield i, fn(trial_rng(seed, i), **kwargs)
