"""Loci, separating transcendence splits, minimal-polynomial presentations,
Hensel/Newton lifting, local surjectivity sampling and the empty-interior
enumeration.

The henselian topology is realized concretely as the t-adic topology on
truncated series; neighbourhoods are valuation balls v(x - a) >= delta, and
field elements enter the series world by expansion at a configurable center.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import (DenominatorVanishes, DivisionByZero, NoConvergence,
                     NonUnitJacobian, ResourceLimit, SpecMismatch)
from .gf import FieldSpec, FqElem
from .lambdafun import KTuple, p_basis
from .poly import (DEFAULT_SPAIR_CAP, GREVLEX, Ideal, MPoly, PolyRing,
                   render_poly)
from .ratfunc import AmbientField, RatFunc
from .series import TruncSeries, embed_ratfunc, series_linear_solve
from .subfield import (SubfieldPresentation, minimal_polynomial, trdeg,
                       staircase_dimension)


@dataclass(frozen=True)
class GenericPoint:
    coords: KTuple
    base: SubfieldPresentation

    def __post_init__(self):
        if len(self.coords) < 1:
            raise ValueError("a generic point needs at least one coordinate")
        for x in self.coords:
            if x.ambient is not self.base.ambient:
                raise SpecMismatch("coordinate outside the ambient field")


@dataclass
class AffineIdeal:
    """Vanishing ideal of a generic point: a reduced grevlex basis in
    GF(q)[w1..wk, x1..xm], where the leading w block tags the base subfield's
    generators (empty when the base is GF(q)) and x1..xm the coordinates."""
    ideal: Ideal
    n_params: int
    n_coords: int
    point: GenericPoint

    @property
    def generators(self):
        return self.ideal.generators

    def substitution_values(self) -> KTuple:
        return tuple(self.point.base.gens) + tuple(self.point.coords)

    def vanishes_at_point(self) -> bool:
        amb = self.point.base.ambient
        vals = self.substitution_values()
        return all(g.evaluate(vals, coeff_map=amb.const, zero=amb.zero).is_zero()
                   for g in self.generators)

    def dimension(self) -> int:
        return staircase_dimension(self.ideal.ring, self.ideal.groebner(GREVLEX))


def locus(point: GenericPoint, spair_cap: int = DEFAULT_SPAIR_CAP) -> AffineIdeal:
    """The vanishing ideal of the coordinates over the base: kernel of
    x_i -> a_i (and w_j -> base generator j), computed by saturating the tag
    ideal at the denominators and eliminating the ambient variables."""
    amb = point.base.ambient
    k = len(point.base.gens)
    m = len(point.coords)
    tag_names = [f"w{j + 1}" for j in range(k)] + [f"x{i + 1}" for i in range(m)]
    taken = set(amb.ring.names)
    tag_names = [_freshen(n, taken) for n in tag_names]
    big = PolyRing.get(amb.spec, amb.ring.names + tuple(tag_names))
    var_map = list(range(amb.n))
    gens = []
    den_product = big.one
    for i, g in enumerate(tuple(point.base.gens) + tuple(point.coords)):
        tag = big.var(amb.n + i)
        num = g.num.map_ring(big, var_map)
        den = g.den.map_ring(big, var_map)
        gens.append(den * tag - num)
        den_product = den_product * den
    from .poly import saturate_and_eliminate
    small = saturate_and_eliminate(Ideal(big, gens), den_product, tag_names,
                                   spair_cap)
    return AffineIdeal(small, k, m, point)


def _freshen(name, taken):
    while name in taken:
        name = "_" + name
    taken.add(name)
    return name


# -- separating transcendence splits ---------------------------------------


def sep_trans_split(b: KTuple, D: SubfieldPresentation,
                    spair_cap: int = DEFAULT_SPAIR_CAP):
    """Refine b to a separating transcendence basis of D(b)/D: returns
    (b1, b2) with b1 transcendental coordinates and every element of b2
    separably algebraic over D(b1), or None when no split works (the
    extension is inseparable); subsets of size trdeg are retried for
    |b| <= 4 before giving up."""
    def try_split(basis_idx):
        b1 = tuple(b[i] for i in basis_idx)
        rest = [i for i in range(len(b)) if i not in basis_idx]
        base = SubfieldPresentation(D.ambient, D.gens + b1)
        prefix = base
        for i in rest:
            mp = minimal_polynomial(b[i], prefix, spair_cap)
            if mp is None or not mp.separable:
                return None
            prefix = prefix.adjoin(b[i])
        return b1, tuple(b[i] for i in rest)

    greedy: list[int] = []
    base = D
    for i, x in enumerate(b):
        if trdeg(base.adjoin(x), spair_cap) > trdeg(base, spair_cap):
            greedy.append(i)
            base = base.adjoin(x)
    split = try_split(greedy)
    if split is not None:
        return split
    if len(b) <= 4:
        want = len(greedy)
        for combo in itertools.combinations(range(len(b)), want):
            if list(combo) == greedy:
                continue
            base2 = D
            ok = True
            for i in combo:
                if trdeg(base2.adjoin(b[i]), spair_cap) == trdeg(base2, spair_cap):
                    ok = False
                    break
                base2 = base2.adjoin(b[i])
            if not ok:
                continue
            split = try_split(list(combo))
            if split is not None:
                return split
    return None


def tool_presentation(a: KTuple, D: SubfieldPresentation,
                      spair_cap: int = DEFAULT_SPAIR_CAP):
    """Minimal-polynomial presentation of the coordinates: for each j a pair
    (g_j, h_j) in GF(q)[w-block, X1..Xm] with g_j(point, X_j)/h_j(point) the
    minimal polynomial of a_j over D(a_0..a_{j-1}), and (0, 1) for
    transcendental coordinates."""
    amb = D.ambient
    k = len(D.gens)
    m = len(a)
    names = [f"w{j + 1}" for j in range(k)] + [f"x{i + 1}" for i in range(m)]
    taken = set()
    names = [_freshen(n, taken) for n in names]
    ring = PolyRing.get(amb.spec, tuple(names))
    out = []
    for j in range(m):
        base = SubfieldPresentation(amb, D.gens + tuple(a[:j]))
        mp = minimal_polynomial(a[j], base, spair_cap)
        if mp is None:
            out.append((ring.zero, ring.one))
            continue
        # witnesses share the leading coefficient as common denominator
        var_map = list(range(k + j))  # y1..y_{k+j} -> w-block then x-prefix
        h = mp.coeffs[0].den if mp.coeffs else ring.one
        if mp.coeffs:
            h = mp.coeffs[0].den.map_ring(ring, var_map)
        xj = ring.var(k + j)
        g = h * xj ** mp.degree
        for i, w in enumerate(mp.coeffs):
            if w.den != mp.coeffs[0].den:
                raise AssertionError("minimal polynomial coefficients do not share a denominator")
            if not w.num.is_zero():
                g = g + w.num.map_ring(ring, var_map) * xj ** i
        out.append((g, h))
    return ring, out


# -- Newton systems and Hensel lifting --------------------------------------


@dataclass
class NewtonSystem:
    """Polynomials f1..fr over GF(q) in (x-block, y-block) variables with the
    formal Jacobian taken along the y block."""
    ring: PolyRing
    polys: list[MPoly]
    n_x: int
    n_y: int

    def __post_init__(self):
        if len(self.polys) != self.n_y:
            raise ValueError("need exactly one equation per y variable")
        if self.ring.nvars != self.n_x + self.n_y:
            raise ValueError("ring size does not match the blocks")

    def jacobian(self) -> list[list[MPoly]]:
        return [[f.derivative(self.n_x + j) for j in range(self.n_y)]
                for f in self.polys]


def _eval_series(f: MPoly, point: list[TruncSeries], spec: FieldSpec,
                 prec: int) -> TruncSeries:
    return f.evaluate(point,
                      coeff_map=lambda c: TruncSeries.constant(spec, c, prec),
                      zero=TruncSeries.zero(spec, prec)).truncate(prec)


def hensel_newton(sys: NewtonSystem, x0, y0, prec: int,
                  max_steps: int = 64):
    """Newton-iterate y <- y - J^{-1} f(x0, y) until f(x0, y) == 0 mod t^prec.

    Requires v(f_i(x0, y0)) >= 1 and a unit Jacobian at (x0, y0); residual
    valuation must strictly increase (it doubles, given the unit Jacobian).
    Returns (y, steps)."""
    spec = sys.ring.spec
    x0 = [s.truncate(prec) for s in x0]
    y = [s.truncate(prec) for s in y0]
    if sys.n_y == 0:
        return [], 0
    jac = sys.jacobian()

    def residual(ys):
        return [_eval_series(f, x0 + ys, spec, prec) for f in sys.polys]

    res = residual(y)
    res_val = min(r.val for r in res)
    if res_val == 0:
        raise NoConvergence("initial residual already a unit")
    jac_now = [[_eval_series(e, x0 + y, spec, prec) for e in row] for row in jac]
    try:
        _, det_val = series_linear_solve([row[:] for row in jac_now],
                                         [TruncSeries.zero(spec, prec)] * sys.n_y)
    except DivisionByZero:
        raise NonUnitJacobian("Jacobian is singular at the expansion point")
    if det_val != 0:
        raise NonUnitJacobian(f"Jacobian determinant has valuation {det_val}")

    steps = 0
    while res_val < prec:
        steps += 1
        if steps > max_steps:
            raise NoConvergence(f"no convergence within {max_steps} Newton steps")
        jac_now = [[_eval_series(e, x0 + y, spec, prec) for e in row] for row in jac]
        try:
            delta, _ = series_linear_solve(jac_now, res)
        except DivisionByZero:
            raise NonUnitJacobian("Jacobian degenerated during the iteration")
        y = [(yi - di).truncate(prec) for yi, di in zip(y, delta)]
        res = residual(y)
        new_val = min(r.val for r in res)
        if new_val <= res_val:
            raise NoConvergence(
                f"residual valuation stalled at {new_val} (was {res_val})")
        res_val = new_val
    return y, steps


# -- local surjectivity sampling ---------------------------------------------


@dataclass
class SurjectivityReport:
    samples: int
    lifted: int
    failures: list
    precision: int
    center: int
    jacobian_valuation: int
    mode: str
    stage: int
    sigma: tuple[int, ...] | None
    projected_on_locus: int
    tool_zeros: int           # lifted points that are common zeros of every
                              # presentation polynomial with unit denominators
    tool_zeros_on_locus: int  # ... of those, how many satisfy the full locus

    def to_dict(self):
        return {
            "samples": self.samples,
            "lifted": self.lifted,
            "failures": self.failures,
            "precision": self.precision,
            "center": self.center,
            "jacobian_valuation": self.jacobian_valuation,
            "mode": self.mode,
            "stage": self.stage,
            "sigma": list(self.sigma) if self.sigma is not None else None,
            "projected_on_locus": self.projected_on_locus,
            "tool_zeros": self.tool_zeros,
            "tool_zeros_on_locus": self.tool_zeros_on_locus,
        }


def _pick_center(amb: AmbientField, elements, prec: int,
                 center: int | None):
    """First center (as an integer encoding of an FqElem) at which every
    element embeds; honors an explicit request."""
    spec = amb.spec
    candidates = ([center] if center is not None else list(range(spec.q)))
    last_err = None
    for cval in candidates:
        gamma = spec.elem(cval) if spec.m > 1 else FqElem(spec, cval % spec.p)
        try:
            embedded = [embed_ratfunc(x, gamma, prec) for x in elements]
            return cval, gamma, embedded
        except DenominatorVanishes as e:
            last_err = e
    raise DenominatorVanishes(
        f"no usable expansion center among {candidates}: {last_err}")


def local_surjectivity_check(a: KTuple, b: KTuple, C: SubfieldPresentation,
                             samples: int, prec: int, seed: int = 0,
                             center: int | None = None,
                             spair_cap: int = DEFAULT_SPAIR_CAP) -> SurjectivityReport:
    """Sample t-adic perturbations of the separable side's coordinate tuple
    (valuation >= 1), Newton-lift the algebraic block and count successes.

    If C(a, b)/C(a) is separable the check runs directly on a; otherwise the
    finite truncation of the local lambda closure replaces a first (its
    coordinate projection sigma is reported)."""
    from .closure import is_separable, lambda_fbc

    amb = C.ambient
    if amb.n != 1:
        raise ValueError("surjectivity sampling needs a univariate ambient field")
    D_a = SubfieldPresentation(amb, C.gens + tuple(a))
    E = SubfieldPresentation(amb, D_a.gens + tuple(b))
    if is_separable(D_a, E, spair_cap, _precheck=False):
        mode, stage, sigma = "direct", 0, None
        x_tuple = tuple(a)
    else:
        c = p_basis(C, spair_cap)
        fbc = lambda_fbc(tuple(a), tuple(b), C, c, spair_cap=spair_cap)
        x_tuple = fbc.values
        sigma = fbc.sigma
        mode, stage = "lambda", fbc.stage

    D_x = SubfieldPresentation(amb, C.gens + x_tuple)
    split = sep_trans_split(tuple(b), D_x, spair_cap)
    if split is None:
        raise NonUnitJacobian("no separating split of the target tuple; "
                              "inseparability leaked through")
    b1, b2 = split
    full = x_tuple + b1 + b2
    ring, pres = tool_presentation(full, C, spair_cap)
    n_x = len(C.gens) + len(x_tuple) + len(b1)
    n_y = len(b2)
    polys = []
    for j in range(len(x_tuple) + len(b1), len(full)):
        g, h = pres[j]
        polys.append(g)
    sys = NewtonSystem(ring, polys, n_x, n_y)

    # choose a center where all coordinates embed and the Jacobian diagonal
    # stays a unit
    elements = list(C.gens) + list(full)
    spec = amb.spec
    attempt_centers = [center] if center is not None else list(range(spec.q))
    chosen = None
    last_reason = None
    for cand in attempt_centers:
        try:
            cval, gamma, embedded = _pick_center(amb, elements, prec, cand)
        except DenominatorVanishes as e:
            last_reason = e
            continue
        jac = sys.jacobian()
        point = embedded
        ok = True
        for j in range(n_y):
            dval = _eval_series(jac[j][j], point, spec, prec).val
            if dval != 0:
                ok = False
                last_reason = NonUnitJacobian(
                    f"diagonal Jacobian entry {j} has valuation {dval} at center {cand}")
                break
        if ok:
            chosen = (cval, gamma, embedded)
            break
    if chosen is None:
        if isinstance(last_reason, NonUnitJacobian):
            raise last_reason
        raise DenominatorVanishes(str(last_reason))
    cval, gamma, embedded = chosen
    x_center = embedded[:n_x]
    y_center = embedded[n_x:]

    loc_full = locus(GenericPoint(full, C), spair_cap)
    loc_a = locus(GenericPoint(tuple(a), C), spair_cap)

    rng = random.Random(seed)
    lifted = 0
    on_locus = 0
    tool_zeros = 0
    tool_zeros_on_locus = 0
    failures = []
    for s in range(samples):
        perturbed = [xc + TruncSeries.random_perturbation(spec, prec, rng)
                     for xc in x_center[len(C.gens):]]
        x_point = x_center[:len(C.gens)] + perturbed
        try:
            y_star, _steps = hensel_newton(sys, x_point, y_center, prec)
        except (NonUnitJacobian, NoConvergence) as e:
            failures.append({"sample": s, "error": type(e).__name__,
                             "detail": str(e)})
            continue
        lifted += 1
        full_point = x_point + y_star
        # Lemma-TOOL desk form: a sampled common zero of the whole
        # presentation with unit denominators must land on the full locus
        all_zero = all(_eval_series(g, full_point, spec, prec).is_zero()
                       for g, _h in pres)
        units = all(h.is_constant()
                    or _eval_series(h, full_point, spec, prec).val == 0
                    for _g, h in pres)
        if all_zero and units:
            tool_zeros += 1
            if _point_on_ideal(loc_full, full_point, spec, prec):
                tool_zeros_on_locus += 1
        if sigma is not None:
            proj = [full_point[len(C.gens) + i] for i in sigma]
        else:
            proj = list(full_point[len(C.gens):len(C.gens) + len(a)])
        if _point_on_ideal(loc_a, list(x_center[:len(C.gens)]) + proj, spec, prec):
            on_locus += 1
    return SurjectivityReport(samples, lifted, failures, prec, cval, 0,
                              mode, stage, sigma, on_locus,
                              tool_zeros, tool_zeros_on_locus)


def _point_on_ideal(aff: AffineIdeal, point: list[TruncSeries],
                    spec: FieldSpec, prec: int) -> bool:
    for g in aff.generators:
        if not _eval_series(g, point, spec, prec).is_zero():
            return False
    return True


# -- the empty-interior enumeration ------------------------------------------


@dataclass
class InteriorScanReport:
    p: int
    precision: int
    ybound: int
    image_size: int
    coset_hits: dict  # m -> number of full cosets c + t^m * (everything)

    def no_full_coset_up_to(self, m_max: int) -> bool:
        return all(self.coset_hits.get(m, 0) == 0
                   for m in range(m_max + 1))

    def to_dict(self):
        return {
            "p": self.p,
            "precision": self.precision,
            "ybound": self.ybound,
            "image_size": self.image_size,
            "coset_hits": {str(m): v for m, v in sorted(self.coset_hits.items())},
        }


def _scan_image(p: int, prec: int, ybound: int, reverse: bool = False):
    """Residues of y^p + t*y^(2p) mod t^prec for y in F_p[t], deg y < ybound."""
    images = set()
    space = itertools.product(range(p), repeat=max(ybound, 0))
    items = list(space)
    if reverse:
        items = items[::-1]
    for coeffs in items:
        # y = sum coeffs[i] t^i; y^p has coefficient coeffs[i] at t^(p*i)
        yp = [0] * prec
        for i, c in enumerate(coeffs):
            if p * i < prec and c:
                yp[p * i] = c
        # y^2 then its p-th power
        y2 = [0] * prec
        for i, ci in enumerate(coeffs):
            if ci == 0:
                continue
            for j, cj in enumerate(coeffs):
                if cj and i + j < prec:
                    y2[i + j] = (y2[i + j] + ci * cj) % p
        y2p = [0] * prec
        for i, c in enumerate(y2):
            if c and p * i < prec:
                y2p[p * i] = c
        # t * y^(2p) + y^p
        out = list(yp)
        for i in range(prec - 1):
            if y2p[i]:
                out[i + 1] = (out[i + 1] + y2p[i]) % p
        images.add(tuple(out))
    return images


def interior_scan(p: int, prec: int, ybound: int,
                  max_coset_level: int | None = None) -> InteriorScanReport:
    """Enumerate the image of x -> x^p + t x^(2p) on polynomials of degree
    < ybound, then report for each m whether the image contains a full coset
    c + t^m * (entire residue space mod t^prec).  A second enumeration in
    reversed order must agree exactly."""
    images = _scan_image(p, prec, ybound)
    check = _scan_image(p, prec, ybound, reverse=True)
    if images != check:
        raise AssertionError("image enumerations disagree between orders")
    m_max = prec - 1 if max_coset_level is None else max_coset_level
    hits: dict[int, int] = {}
    size = len(images)
    for m in range(m_max + 1):
        full = p ** (prec - m)
        if full > size:
            hits[m] = 0
            continue
        prefix_counts: dict[tuple, int] = {}
        for residue in images:
            key = residue[:m]
            prefix_counts[key] = prefix_counts.get(key, 0) + 1
        hits[m] = sum(1 for v in prefix_counts.values() if v == full)
    return InteriorScanReport(p, prec, ybound, size, hits)
