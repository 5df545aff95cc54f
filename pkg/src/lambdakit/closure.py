"""The splitting-pairs recursion and Lambda closures.

One step sends (a, b) to (a', b') where a' appends the left-greedy
p-independent prefix of b over C(a), and b' appends the lambda images of b
with respect to the concatenated basis c + a' (c a p-basis of the base
subfield C).  Iterating from (empty, a) and stopping at the first stage whose
field equals its predecessor realizes the Lambda closure of C(a); stopping as
soon as a target tuple b becomes separable realizes the finite truncation
with its coordinate projection back onto a.

Every element ever appended carries a closed term over the inputs; traces can
be re-evaluated from those terms alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dataclass_field

from .errors import NotSeparableBase, ResourceLimit, SpecMismatch
from .lambdafun import (KTuple, Lam, Var, lambda_eval, multi_indices,
                        p_basis, p_independent, p_ind_prefix_with_flags)
from .poly import DEFAULT_SPAIR_CAP
from .ratfunc import AmbientField, RatFunc
from .subfield import (SubfieldPresentation, field_equal, field_leq, member,
                       prime_subfield, whole_ambient)


@dataclass(frozen=True)
class SplitPair:
    """State (a, b) of the recursion over base C with p-basis c of C."""
    a: KTuple
    b: KTuple
    base: SubfieldPresentation
    c: KTuple

    @property
    def ambient(self) -> AmbientField:
        return self.base.ambient

    def stage_field(self) -> SubfieldPresentation:
        return SubfieldPresentation(self.base.ambient,
                                    self.base.gens + self.a + self.b)


@dataclass
class ClosureTrace:
    base: SubfieldPresentation
    c: KTuple
    stages: list[SplitPair]
    a_terms: list
    b_terms: list
    env: dict
    termination: tuple[str, int]
    growth_steps: int
    closure: SubfieldPresentation

    @property
    def final(self) -> SplitPair:
        return self.stages[-1]


def validate_base(C: SubfieldPresentation, c: KTuple,
                  spair_cap: int = DEFAULT_SPAIR_CAP) -> None:
    """Check the standing hypotheses: K/C separable and c a p-basis of C.
    Trivial base (no generators, empty c) passes immediately; GF(q) is
    perfect so the empty tuple is its p-basis and K/GF(q) is separable."""
    amb = C.ambient
    if not C.gens and not c:
        return
    for ci in c:
        if member(ci, C, spair_cap) is None:
            raise NotSeparableBase(f"{ci} is not an element of the base subfield")
    frob = tuple(g ** amb.spec.p for g in C.gens)
    for i, ci in enumerate(c):
        rest = c[:i] + c[i + 1:]
        if member(ci, SubfieldPresentation(amb, frob + rest), spair_cap) is not None:
            raise NotSeparableBase(f"{ci} is p-dependent inside the base subfield")
    for g in C.gens:
        if member(g, SubfieldPresentation(amb, frob + c), spair_cap) is None:
            raise NotSeparableBase("the given tuple does not p-span the base subfield")
    if not is_separable(C, whole_ambient(amb), spair_cap):
        raise NotSeparableBase("the ambient field is not separable over the base")


@dataclass
class StepOutcome:
    pair: SplitPair
    promoted: list[int]                       # indices of b promoted into a'
    appended: list[tuple[int, tuple[int, ...]]]  # (source index in b, multi-index)
    appended_values: KTuple


def splitting_step(pair: SplitPair, *, verify: bool = True,
                   spair_cap: int = DEFAULT_SPAIR_CAP) -> StepOutcome:
    """One application of the splitting-pairs map.  The appended lambda block
    is ordered by (position in b, lexicographic multi-index), and keeps zeros
    and duplicates exactly as produced."""
    C, c = pair.base, pair.c
    if verify:
        validate_base(C, c, spair_cap)
    base_of_a = SubfieldPresentation(C.ambient, C.gens + pair.a)
    kept, flags = p_ind_prefix_with_flags(pair.b, base_of_a)
    promoted = [i for i, f in enumerate(flags) if f]
    a_new = pair.a + kept
    u = c + a_new
    if not p_independent(u):
        raise NotSeparableBase(
            "concatenated basis failed the absolute p-independence check")
    p = C.ambient.spec.p
    appended: list[tuple[int, tuple[int, ...]]] = []
    values: list[RatFunc] = []
    for i, x in enumerate(pair.b):
        lam = lambda_eval(x, u, checked=False)
        for J in multi_indices(p, len(u)):
            appended.append((i, J))
            values.append(lam[J])
    out = SplitPair(a_new, pair.b + tuple(values), C, c)
    return StepOutcome(out, promoted, appended, tuple(values))


def _pruned_extend(pres_gens: list[RatFunc], base: SubfieldPresentation,
                   xs, spair_cap: int) -> bool:
    """Extend a pruned generator list with the elements of xs that enlarge
    the field; returns whether anything enlarged it."""
    amb = base.ambient
    grew = False
    for x in xs:
        pres = SubfieldPresentation(amb, base.gens + tuple(pres_gens))
        if member(x, pres, spair_cap) is None:
            pres_gens.append(x)
            grew = True
    return grew


def _var_env(a: KTuple, c: KTuple):
    env = {}
    a_terms = []
    for i, x in enumerate(a):
        name = f"a{i + 1}"
        env[name] = x
        a_terms.append(Var(name))
    c_terms = []
    for i, x in enumerate(c):
        name = f"c{i + 1}"
        env[name] = x
        c_terms.append(Var(name))
    return env, a_terms, c_terms


def _iterate(a: KTuple, C: SubfieldPresentation, c: KTuple, *,
             stop,  # stop(stage_index, pres_gens, grew) -> terminal tag or None
             prune: bool, spair_cap: int, max_stages: int) -> ClosureTrace:
    amb = C.ambient
    env, input_terms, c_terms = _var_env(a, c)
    stages = [SplitPair((), a, C, c)]
    a_terms: list = []
    b_terms: list = list(input_terms)
    pres_gens: list[RatFunc] = []
    _pruned_extend(pres_gens, C, a, spair_cap)
    growth = 0
    termination = stop(0, pres_gens, True)
    while termination is None:
        if len(stages) > max_stages:
            raise ResourceLimit(f"closure exceeded {max_stages} stages")
        outcome = splitting_step(stages[-1], verify=False, spair_cap=spair_cap)
        new_a_terms = a_terms + [b_terms[i] for i in outcome.promoted]
        basis_terms = tuple(c_terms) + tuple(new_a_terms)
        p = amb.spec.p
        new_b_terms = list(b_terms)
        appended_terms = [Lam(p, J, b_terms[i], basis_terms)
                          for (i, J) in outcome.appended]
        if prune:
            filtered_vals = []
            filtered_terms = []
            pres = SubfieldPresentation(amb, C.gens + tuple(pres_gens))
            for val, term in zip(outcome.appended_values, appended_terms):
                if val.is_zero():
                    continue
                if member(val, pres, spair_cap) is not None:
                    continue
                filtered_vals.append(val)
                filtered_terms.append(term)
                pres = SubfieldPresentation(amb, pres.gens + (val,))
            pair = SplitPair(outcome.pair.a,
                             stages[-1].b + tuple(filtered_vals), C, c)
            new_b_terms += filtered_terms
            grew = _pruned_extend(pres_gens, C, filtered_vals, spair_cap)
        else:
            pair = outcome.pair
            new_b_terms += appended_terms
            grew = _pruned_extend(pres_gens, C, outcome.appended_values, spair_cap)
        stages.append(pair)
        a_terms = new_a_terms
        b_terms = new_b_terms
        if grew:
            growth += 1
        termination = stop(len(stages) - 1, pres_gens, grew)
    closure_pres = SubfieldPresentation(
        amb, C.gens + tuple(pres_gens),
        label=(C.label or None))
    return ClosureTrace(C, c, stages, a_terms, b_terms, env, termination,
                        growth, closure_pres)


def local_lambda_closure(a: KTuple, C: SubfieldPresentation, c: KTuple, *,
                         prune: bool = False,
                         spair_cap: int = DEFAULT_SPAIR_CAP,
                         max_stages: int = 64) -> ClosureTrace:
    """Iterate splitting steps from (empty, a) until two consecutive stages
    generate the same field over C.  The final stage generates the Lambda
    closure of C(a) in the ambient field."""
    validate_base(C, c, spair_cap)

    def stop(stage_idx, pres_gens, grew):
        if stage_idx > 0 and not grew:
            return ("fixpoint", stage_idx)
        return None

    return _iterate(a, C, c, stop=stop, prune=prune,
                    spair_cap=spair_cap, max_stages=max_stages)


@dataclass
class FbcResult:
    values: KTuple               # the flattened stage tuple a_n + b_n
    sigma: tuple[int, ...]       # positions projecting the tuple onto a
    stage: int                   # minimal qualifying stage n
    trace: ClosureTrace
    ordering_stages: dict | None = None   # permutation -> minimal stage


def _b_separable_over_stage(stage_pres: SubfieldPresentation, b: KTuple,
                            spair_cap: int) -> bool:
    target = SubfieldPresentation(stage_pres.ambient, stage_pres.gens + b)
    return is_separable(stage_pres, target, spair_cap, _precheck=False)


def lambda_fbc(a: KTuple, b: KTuple, C: SubfieldPresentation, c: KTuple, *,
               all_orderings: bool = False, prune: bool = False,
               spair_cap: int = DEFAULT_SPAIR_CAP,
               max_stages: int = 64) -> FbcResult:
    """Finite truncation of the local lambda closure: iterate until b is
    separable over the stage field (minimal such stage for the given ordering
    of a).  With all_orderings, every ordering of a (|a| <= 4) is tried and
    the maximal minimal stage is reported and used."""
    validate_base(C, c, spair_cap)
    amb = C.ambient

    def minimal_stage_for(tup: KTuple) -> ClosureTrace:
        def stop(stage_idx, pres_gens, grew):
            pres = SubfieldPresentation(amb, C.gens + tuple(pres_gens))
            if _b_separable_over_stage(pres, b, spair_cap):
                return ("target_separable", stage_idx)
            return None
        return _iterate(tup, C, c, stop=stop, prune=prune,
                        spair_cap=spair_cap, max_stages=max_stages)

    ordering_stages = None
    stop_at = None
    if all_orderings:
        if len(a) > 4:
            raise ResourceLimit("all-orderings mode is limited to |a| <= 4")
        ordering_stages = {}
        for perm in itertools.permutations(range(len(a))):
            tr = minimal_stage_for(tuple(a[i] for i in perm))
            ordering_stages[perm] = tr.termination[1]
        stop_at = max(ordering_stages.values())

    if stop_at is None:
        trace = minimal_stage_for(a)
    else:
        def stop(stage_idx, pres_gens, grew):
            if stage_idx >= stop_at:
                return ("target_separable", stage_idx)
            return None
        trace = _iterate(a, C, c, stop=stop, prune=prune,
                         spair_cap=spair_cap, max_stages=max_stages)

    final = trace.final
    values = final.a + final.b
    offset = len(final.a)
    sigma = tuple(offset + i for i in range(len(a)))
    assert tuple(values[i] for i in sigma) == tuple(a), "sigma projection broke"
    return FbcResult(values, sigma, trace.termination[1], trace, ordering_stages)


def lambda_closure_of_subfield(gens: KTuple, ambient: AmbientField | None = None,
                               *, spair_cap: int = DEFAULT_SPAIR_CAP,
                               max_stages: int = 64) -> tuple[SubfieldPresentation, ClosureTrace]:
    """Lambda closure of GF(q)(gens) in the ambient field, over the perfect
    prime base (C = GF(q), c empty).  Returns a small presentation (pruned
    scan of the final stage, a-part first) together with the full trace."""
    if ambient is None:
        if not gens:
            raise ValueError("need either generators or an explicit ambient")
        ambient = gens[0].ambient
    C = prime_subfield(ambient)
    trace = local_lambda_closure(tuple(gens), C, (), spair_cap=spair_cap,
                                 max_stages=max_stages)
    final = trace.final
    pruned: list[RatFunc] = []
    _pruned_extend(pruned, C, final.a + final.b, spair_cap)
    pres = SubfieldPresentation(ambient, tuple(pruned))
    return pres, trace


# -- separability deciders ---------------------------------------------------


def is_separable(D: SubfieldPresentation, E: SubfieldPresentation,
                 spair_cap: int = DEFAULT_SPAIR_CAP, *,
                 _precheck: bool = True) -> bool:
    """Is E/D separable?  Computes a p-basis d of D and tests it for
    p-independence in E: each d_i must avoid E^(p)(d minus d_i)."""
    if D.ambient is not E.ambient:
        raise SpecMismatch("subfields of different ambients")
    if _precheck and not field_leq(D, E, spair_cap):
        raise ValueError("is_separable requires D <= E")
    amb = D.ambient
    d = p_basis(D, spair_cap)
    frob_e = tuple(g ** amb.spec.p for g in E.gens)
    for i, di in enumerate(d):
        rest = d[:i] + d[i + 1:]
        if member(di, SubfieldPresentation(amb, frob_e + rest), spair_cap) is not None:
            return False
    return True


def is_separated(D: SubfieldPresentation, E: SubfieldPresentation,
                 spair_cap: int = DEFAULT_SPAIR_CAP) -> bool:
    """Is E/D separated, i.e. separable with E = E^(p) * D?"""
    if not is_separable(D, E, spair_cap):
        return False
    amb = D.ambient
    frob_e = tuple(g ** amb.spec.p for g in E.gens)
    reach = SubfieldPresentation(amb, frob_e + D.gens)
    return all(member(g, reach, spair_cap) is not None for g in E.gens)
