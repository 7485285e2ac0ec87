"""Cohomology engine for complete intersections in projective space.

The headline computation represents H^q(X, tensor of symmetric cotangent
powers, twisted) as an explicit subspace of the monomial model of top
cohomology on P^N: the intersection of the kernels of multiplication maps
attached to the defining equations (and, for the untilded bundles, of the
Euler contractions). Dimensions and bases come out of exact rational linear
algebra; every result carries the list of constraint matrices that cut it
out, so any basis vector can be re-verified by matrix-vector products alone.

Smoothness of the intersection chain is assumed, not certified: the linear
algebra is computed unconditionally and results carry a disclaimer. A
probabilistic finite-field Jacobian spot-check is available but never blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb

from . import cech, lambdacalc as lam
from .cech import CohomClass, CohomSpace, DEFAULT_BASIS_CAP
from .exactalg import (
    QQ,
    PrimeField,
    SubspaceBasis,
    apply_to_basis,
    combine_basis,
    intersect_subspaces,
    kernel_basis,
    rref_vectors,
)
from .poly import HomogPoly, deformed_fermat_pair, fermat_generic_system, vandermonde_coeff_rows
from .rng import SplitMix64

SMOOTHNESS_DISCLAIMER = (
    "smoothness of the intersection chain is assumed, not certified; "
    "see jacobian_spot_check for a probabilistic audit"
)


class EngineError(ValueError):
    pass


class NonSimpleSettingError(EngineError):
    pass


class EulerCrossCheckError(RuntimeError):
    """The factor-by-factor Euler image disagreed with the chained exhaustion."""


class WitnessMembershipError(RuntimeError):
    """A constructed witness failed an exact kernel membership it must satisfy."""


@dataclass
class CompleteIntersectionInput:
    """Ordered defining equations F_1..F_c; order fixes the chain X_1 ⊇ ... ⊇ X_c."""

    ambient_N: int
    equations: list

    def __post_init__(self):
        c = len(self.equations)
        if not 1 <= c <= self.ambient_N - 1:
            raise EngineError(f"codimension {c} out of range for N={self.ambient_N}")
        for f in self.equations:
            if f.nvars != self.ambient_N + 1:
                raise EngineError("equation variable count does not match ambient")
            if f.is_zero() or f.degree <= 0:
                raise EngineError("equations must be nonzero of positive degree")

    @property
    def codim(self):
        return len(self.equations)

    @property
    def degrees(self):
        return tuple(f.degree for f in self.equations)


def fermat_ci(N, c, e, coeff_rows=None) -> CompleteIntersectionInput:
    """Generic Fermat-type chain; default coefficients are Vandermonde rows."""
    if coeff_rows is None:
        coeff_rows = vandermonde_coeff_rows(N, c)
    return CompleteIntersectionInput(N, fermat_generic_system(N, c, e, coeff_rows))


@dataclass
class CohomologyResult:
    q: int
    ambient_space: CohomSpace
    subspace: SubspaceBasis
    dim: int
    certificate: list
    constraints: list = dc_field(default_factory=list, repr=False)
    notes: str = SMOOTHNESS_DISCLAIMER

    def to_json_dict(self, include_basis=False):
        out = {
            "q": self.q,
            "ambient_dim": self.ambient_space.dim(),
            "ambient_space": str(self.ambient_space),
            "dim": self.dim,
            "constraints": self.certificate,
            "notes": self.notes,
        }
        if include_basis:
            out["basis"] = [
                {str(k): str(Fraction(v)) for k, v in vec.items()}
                for vec in self.subspace.vectors
            ]
        return out


def verify_result(result: CohomologyResult) -> bool:
    """Independent re-check: every basis vector maps to zero under every
    stored constraint matrix (matrix-vector products only)."""
    for cm in result.constraints:
        for vec in result.subspace.vectors:
            if cm.matrix.mul_vec(vec):
                return False
    return True


# ---------------------------------------------------------------------------
# kernel intersection driver


def intersect_constraint_kernels(maps, start_basis=None, cap=DEFAULT_BASIS_CAP):
    """Intersect kernels of the given maps, most constraining first.

    Maps are applied incrementally to the running subspace so intermediate
    eliminations shrink as constraints bite; applying the largest-target
    (highest-rank) constraints first keeps the intermediate subspace
    dimensions low. Returns the canonical basis and a certificate entry per
    constraint with the rank observed on the subspace it was applied to.
    """
    if not maps:
        raise EngineError("no constraints to intersect")
    source = maps[0].source
    for m in maps:
        if m.source != source:
            raise EngineError("constraint sources differ")
    order = sorted(range(len(maps)), key=lambda i: (-maps[i].target.dim(), i))
    basis = start_basis
    certificate = []
    for idx in order:
        cm = maps[idx]
        restricted = cm.matrix if basis is None else apply_to_basis(cm.matrix, basis)
        ker = kernel_basis(restricted)
        entry = cm.rank_data(restricted.ncols - ker.dim)
        entry["applied_on_dim"] = restricted.ncols
        certificate.append(entry)
        basis = ker if basis is None else combine_basis(basis, ker)
    n = source.dim()
    canonical = SubspaceBasis(QQ, n, rref_vectors(QQ, n, basis.vectors))
    return canonical, certificate


# ---------------------------------------------------------------------------
# tilde cohomology of a simple setting


def _factor_position(setting, level, k):
    """1-based tensor-factor index of entry k (1-based) of the given level in
    the limit setting's concatenated factor list."""
    return sum(len(setting.tuples[m]) for m in range(level)) + k


def tilde_constraints(ci: CompleteIntersectionInput, setting, a, cap=DEFAULT_BASIS_CAP):
    """Target space and the multiplication constraints cutting out the image."""
    lim = lam.sigma_lim(setting)
    b = lam.b_sigma(setting)
    space = CohomSpace(ci.ambient_N, lim.tuples[0], a - b)
    maps = []
    p = setting.codim
    for i in range(1, p + 1):
        f = ci.equations[i - 1]
        maps.append(cech.mul_poly_matrix(space, f, cap))
        for j in range(i, p + 1):
            for k in range(1, len(setting.tuples[j]) + 1):
                maps.append(
                    cech.mul_dpoly_matrix(space, f, _factor_position(setting, j, k), cap)
                )
    return space, maps


def tilde_cohomology(
    ci: CompleteIntersectionInput, setting, a: int, cap=DEFAULT_BASIS_CAP
) -> CohomologyResult:
    """Dimension and basis of H^{q}(X_p, tilde-power bundle, twist a) inside
    the monomial model of H^N(P^N, .): the intersection of ker(.F_i) with the
    kernels of the differential multiplications at every factor of level >= i.
    """
    if setting.ambient_N != ci.ambient_N:
        raise EngineError("ambient mismatch between setting and equations")
    if setting.degrees != ci.degrees[: setting.codim] or setting.codim != ci.codim:
        raise EngineError(
            f"setting degrees {setting.degrees} do not match equations {ci.degrees}"
        )
    if not setting.is_simple():
        raise NonSimpleSettingError(
            "setting is not simple; use simplify_and_bound for the lower bound"
        )
    q = setting.q()
    if q < 0:
        raise EngineError(f"q = {q} < 0: no group to compute")
    total = setting.total()
    # a < |setting| is the stated bound; the pure restriction tower (no
    # exponents anywhere) is exact for every twist, so only that case is let
    # through unconditionally.
    if total > 0 and a >= total:
        raise EngineError(f"twist a={a} must be < {total}")
    space, maps = tilde_constraints(ci, setting, a, cap)
    if space.is_zero():
        empty = SubspaceBasis(QQ, 0, [])
        return CohomologyResult(q, space, empty, 0, [])
    basis, certificate = intersect_constraint_kernels(maps, cap=cap)
    return CohomologyResult(q, space, basis, basis.dim, certificate, maps)


# ---------------------------------------------------------------------------
# Euler image (untilded bundles inside the tilde model)


def expected_euler_image_dim(space: CohomSpace) -> int:
    """Dimension of the image of the untilded top cohomology inside the tilde
    model, via the chained factor-by-factor exhaustion.

    Each step trades one untilded factor S^l for the tilde pair
    (S^l tilde) minus (S^{l-1} tilde); the recursion bottoms out at the
    product formula. Exact binomial arithmetic, no matrices.
    """
    N = space.ambient_N
    a = space.twist

    def product_dim(degs):
        w = sum(degs) - a
        if w < N + 1:
            return 0
        d = comb(w - 1, N)
        for l in degs:
            d *= comb(l + N, N)
        return d

    memo = {}

    def rec(state):
        if state in memo:
            return memo[state]
        for idx, (l, tilde) in enumerate(state):
            if not tilde and l >= 1:
                up = state[:idx] + ((l, True),) + state[idx + 1 :]
                down = state[:idx] + ((l - 1, True),) + state[idx + 1 :]
                val = rec(up) - rec(down)
                memo[state] = val
                return val
        val = product_dim(tuple(l for l, _ in state))
        memo[state] = val
        return val

    return rec(tuple((l, False) for l in space.factor_degrees))


def euler_constraints(space: CohomSpace, cap=DEFAULT_BASIS_CAP):
    """Contraction maps for every factor of positive degree."""
    return [
        cech.euler_contraction_matrix(space, j + 1, cap)
        for j, l in enumerate(space.factor_degrees)
        if l >= 1
    ]


def euler_image(space: CohomSpace, cap=DEFAULT_BASIS_CAP) -> SubspaceBasis:
    """The untilded top cohomology inside the tilde model: the intersection of
    the per-factor contraction kernels.

    The dimension is always cross-checked against the chained exhaustion;
    a mismatch raises EulerCrossCheckError rather than returning silently.
    """
    if any(l < 1 for l in space.factor_degrees):
        raise EngineError("euler_image needs every factor degree >= 1")
    maps = euler_constraints(space, cap)
    basis, _ = intersect_constraint_kernels(maps, cap=cap)
    expected = expected_euler_image_dim(space)
    if basis.dim != expected:
        raise EulerCrossCheckError(
            f"contraction-kernel intersection has dim {basis.dim} but the "
            f"chained exhaustion gives {expected} on {space}"
        )
    return basis


def omega_cohomology(
    ci: CompleteIntersectionInput, ells, a: int, cap=DEFAULT_BASIS_CAP
) -> CohomologyResult:
    """H^q(X, tensor of S^{l_i} cotangent powers, twist a) for l_i >= c:
    the tilde subspace intersected with the Euler image."""
    ells = tuple(ells)
    c = ci.codim
    n = ci.ambient_N - c
    k = len(ells)
    if any(l < c for l in ells):
        raise EngineError(f"all factor degrees must be >= codimension {c}")
    if a >= sum(ells) - k:
        raise EngineError(f"twist a={a} must be < {sum(ells) - k}")
    q = n - k * c
    if q < 0:
        raise EngineError(f"q = {q} < 0: no group to compute")
    setting = lam.LambdaSetting(
        ci.ambient_N, ci.degrees, tuple(() for _ in range(c)) + (ells,)
    )
    tilde = tilde_cohomology(ci, setting, a, cap)
    space = tilde.ambient_space
    cmaps = euler_constraints(space, cap)
    if not cmaps:
        # every limit factor is S^0: the Euler image is the whole model
        return CohomologyResult(
            q, space, tilde.subspace, tilde.dim, tilde.certificate, tilde.constraints
        )
    if len(cmaps) >= 2:
        euler_image(space, cap)  # mandatory multi-factor cross-check
    basis, extra_cert = intersect_constraint_kernels(
        cmaps, start_basis=tilde.subspace, cap=cap
    )
    return CohomologyResult(
        q,
        space,
        basis,
        basis.dim,
        tilde.certificate + extra_cert,
        tilde.constraints + cmaps,
    )


# ---------------------------------------------------------------------------
# non-vanishing witness


@dataclass
class WitnessResult:
    cls: CohomClass
    nonzero: bool
    constraints_checked: int
    degenerate: bool = False


def nonvanishing_witness(
    setting, a: int, P: HomogPoly, coeff_rows=None, cap=DEFAULT_BASIS_CAP
) -> WitnessResult:
    """Expand the explicit residue witness for a Fermat-generic chain and
    verify its exact membership in every constraint kernel.

    The witness is P / (Z_0...Z_N)^{e-1} tensored with the factors
    (Z_0 dZ_1 - Z_1 dZ_0)^{l_f} over the limit exponents l_f; deg P must be
    (q+1)e + a - N - 1 - 2|Sigma_lim| and the degree bound
    e >= (N + 1 + 2|Sigma_lim| - a) / (q+1) must hold.
    """
    if not setting.is_simple():
        raise NonSimpleSettingError("witness construction needs a simple setting")
    N = setting.ambient_N
    degrees = set(setting.degrees)
    if len(degrees) != 1:
        raise EngineError("witness construction needs a single common degree")
    e = degrees.pop()
    q = setting.q()
    lim = lam.sigma_lim(setting)
    lim_total = lim.total()
    if (q + 1) * e < N + 1 + 2 * lim_total - a:
        raise EngineError(
            f"degree bound violated: need e >= {(N + 1 + 2 * lim_total - a)}/{q + 1}"
        )
    expected_deg = (q + 1) * e + a - N - 1 - 2 * lim_total
    if not P.is_zero() and P.degree != expected_deg:
        raise EngineError(f"P must have degree {expected_deg}, got {P.degree}")
    ci = fermat_ci(N, setting.codim, e, coeff_rows)
    space, maps = tilde_constraints(ci, setting, a, cap)
    factors = lim.tuples[0]
    base = tuple(e - 1 for _ in range(N + 1))
    coeffs = {}
    if not P.is_zero():
        choices = [()]
        for l in factors:
            choices = [prev + (t,) for prev in choices for t in range(l + 1)]
        for Pm, cP in P.terms.items():
            for ts in choices:
                coeff = cP
                I = list(base)
                for m, ex in enumerate(Pm):
                    I[m] -= ex
                Js = []
                for l, t in zip(factors, ts):
                    coeff *= comb(l, t) * (-1) ** (l - t)
                    J = [0] * (N + 1)
                    J[0], J[1] = l - t, t
                    Js.append(tuple(J))
                    I[0] -= t
                    I[1] -= l - t
                if min(I) >= 1:
                    key = tuple(Js) + (tuple(I),)
                    w = coeffs.get(key, 0) + coeff
                    if w:
                        coeffs[key] = w
                    else:
                        del coeffs[key]
    cls = CohomClass(space, coeffs)
    if cls.is_zero():
        return WitnessResult(cls, False, 0, degenerate=True)
    vec = cls.to_vector(cap)
    for cm in maps:
        image = cm.matrix.mul_vec(vec)
        if image:
            raise WitnessMembershipError(
                f"witness has nonzero image under {cm.kind} {cm.label}; "
                "this indicates an implementation bug"
            )
    return WitnessResult(cls, True, len(maps))


# ---------------------------------------------------------------------------
# non-simple settings: lower bound via the simplification chain


@dataclass
class SimplifiedBound:
    setting: object
    chain: list
    result: CohomologyResult

    @property
    def lower_bound(self):
        return self.result.dim


def simplify_and_bound(
    ci: CompleteIntersectionInput, setting, a: int, cap=DEFAULT_BASIS_CAP
) -> SimplifiedBound:
    """Iterate the exponent-lowering successor to a simple setting with the
    same q and compute its exact dimension: a lower bound for the original.

    Instead of the blanket twist bound a < t, each chain step checks the
    vanishing hypothesis it actually needs (a - deg' < t of the decremented
    successor); a <= 0 always passes, larger twists only when justified.
    """
    chain = [setting]
    current = setting
    while not current.is_simple():
        step = lam.c_step(current)
        # moving a trivial exponent is an isomorphism and needs no vanishing
        if step.c2 is not None and not a - step.degree < step.c2.t_bound():
            raise EngineError(
                f"twist a={a} too large for the simplification step at "
                f"{current.serialize()} (needs a - {step.degree} < {step.c2.t_bound()})"
            )
        current = step.c1
        chain.append(current)
    q0 = setting.q()
    for s in chain:
        if s.q() != q0:
            raise EngineError("q drifted along the simplification chain")
    result = tilde_cohomology(ci, current, a, cap)
    return SimplifiedBound(current, chain, result)


# ---------------------------------------------------------------------------
# plane curves: closed-form descent data
#
# Local sections are stored as (numerator, denominator tag) pairs: the
# denominators are products of the partials F_i, never expanded against the
# numerators, and the two descent identities are checked after clearing them.


@dataclass
class ChartFormTerm:
    sign: int
    numerator: object   # AffinePoly
    denominator: str    # "f1" or "f2"
    form: str           # "dz1" or "dz2"

    def to_json_dict(self):
        return {
            "sign": self.sign,
            "numerator": self.numerator.to_text(),
            "denominator": self.denominator,
            "form": self.form,
        }


@dataclass
class PlaneCurveDescent:
    degree: int
    P: HomogPoly
    top_cocycle: dict
    pair_cocycles: dict
    chart_cocycles: dict
    chart0_pair: tuple
    euler_identity: bool
    descent_top_identity: bool
    descent_pair_identity: bool

    def to_json_dict(self):
        return {
            "degree": self.degree,
            "P": self.P.to_text(),
            "top_cocycle": self.top_cocycle,
            "pair_cocycles": {f"{i}{j}": v for (i, j), v in self.pair_cocycles.items()},
            "chart_cocycles": {str(i): v for i, v in self.chart_cocycles.items()},
            "chart0_pair": [t.to_json_dict() for t in self.chart0_pair],
            "euler_identity": self.euler_identity,
            "descent_top_identity": self.descent_top_identity,
            "descent_pair_identity": self.descent_pair_identity,
        }


def plane_curve_descent(F: HomogPoly, P: HomogPoly) -> PlaneCurveDescent:
    """Closed-form residue data for a smooth plane curve of degree e >= 3.

    Starting from P/(F_0 F_1 F_2) the multiplication and coboundary chase
    produces the edge and vertex cocycles; both descent identities are
    verified symbolically (the second one modulo F) and the chart-0 pair
    (-Q dz2/f1, Q dz1/f2) is emitted.
    """
    if F.nvars != 3:
        raise EngineError("plane curve descent needs 3 variables")
    e = F.degree
    if e < 3:
        raise EngineError("need degree >= 3")
    if P.is_zero() or P.degree != e - 3:
        raise EngineError(f"P must be nonzero of degree {e - 3}")
    partials = [F.partial_derivative(i) for i in range(3)]
    euler_sum = HomogPoly.zero(3, e)
    for i in range(3):
        euler_sum = euler_sum + HomogPoly.variable(3, i) * partials[i]
    euler_ok = euler_sum == F.scaled(e)
    if not euler_ok:
        raise EngineError("Euler identity failed for the input polynomial")

    # edge cocycles: for i<j with complement k, (-1)^k (P/e) Z_k / (F_i F_j)
    pair_data = {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        k = 3 - i - j
        pair_data[(i, j)] = {
            "sign": (-1) ** k,
            "numerator": (HomogPoly.variable(3, k) * P).to_text(),
            "scale": "1/" + str(e),
            "denominator": f"F{i}*F{j}",
        }

    # identity 1: the edge coboundary recovers (P/(F0 F1 F2)) * F exactly,
    # i.e. e*P*F == P * sum_k Z_k F_k after clearing F0 F1 F2.
    lhs = (P * F).scaled(e)
    rhs = HomogPoly.zero(3, lhs.degree)
    for k in range(3):
        rhs = rhs + P * HomogPoly.variable(3, k) * partials[k]
    top_identity = lhs == rhs

    # vertex cocycles: (-1)^i (P/(e F_i)) * (Z_a dZ_b - Z_b dZ_a), a<b complement
    def vertex_form(i):
        a, b = [m for m in range(3) if m != i]
        coeffs = {
            b: HomogPoly.variable(3, a) * P,
            a: (HomogPoly.variable(3, b) * P).scaled(-1),
        }
        return (-1) ** i, coeffs  # dict dZ-index -> numerator poly (before 1/(e F_i))

    vertex = {i: vertex_form(i) for i in range(3)}
    chart_data = {
        i: {
            "sign": vertex[i][0],
            "scale": f"1/({e}*F{i})",
            "form": {f"dZ{m}": pol.to_text() for m, pol in vertex[i][1].items()},
        }
        for i in range(3)
    }

    # identity 2: for each edge i<j with complement k,
    #   (edge_ij * dF) - (vertex_j - vertex_i)  ==  0  modulo F,
    # checked per dZ coefficient after clearing e * F_i * F_j.
    pair_identity = True
    for i, j in ((0, 1), (0, 2), (1, 2)):
        k = 3 - i - j
        for m in range(3):
            lhs_m = (HomogPoly.variable(3, k) * P * partials[m]).scaled((-1) ** k)
            sj, cj = vertex[j]
            si, ci = vertex[i]
            rhs_m = HomogPoly.zero(3, lhs_m.degree)
            if m in cj:
                rhs_m = rhs_m + (partials[i] * cj[m]).scaled(sj)
            if m in ci:
                rhs_m = rhs_m - (partials[j] * ci[m]).scaled(si)
            diff = lhs_m - rhs_m
            if not F.divides_into(diff):
                pair_identity = False

    # chart 0: vertex_i dehomogenizes to (-1)^i (Q/(e f_i)) dz_j; emitted with
    # the conventional scaling by e so the pair reads (-Q dz2/f1, Q dz1/f2)
    Q = P.dehomogenize(0)
    chart0 = (
        ChartFormTerm(-1, Q, "f1", "dz2"),
        ChartFormTerm(1, Q, "f2", "dz1"),
    )
    return PlaneCurveDescent(
        degree=e,
        P=P,
        top_cocycle={"numerator": P.to_text(), "denominator": "F0*F1*F2"},
        pair_cocycles=pair_data,
        chart_cocycles=chart_data,
        chart0_pair=chart0,
        euler_identity=euler_ok,
        descent_top_identity=top_identity,
        descent_pair_identity=pair_identity,
    )


# ---------------------------------------------------------------------------
# deformation-jump experiment


def _pair_partial_constraints(space, F, G, cap):
    maps = []
    for i in range(5):
        for poly in (F.partial_derivative(i), G.partial_derivative(i)):
            maps.append(cech.mul_poly_matrix(space, poly, cap))
    return maps


def jump_dimension(e, alpha, beta, avec=(0, 1, 2, 3, 4), cap=DEFAULT_BASIS_CAP):
    """dim of the common kernel of all ten partial-multiplication maps on
    H^4(P^4, O(-4e)) for the deformed pair at (alpha, beta)."""
    F, G = deformed_fermat_pair(e, alpha, beta, avec)
    space = CohomSpace(4, (), -4 * e)
    maps = _pair_partial_constraints(space, F, G, cap)
    basis, cert = intersect_constraint_kernels(maps, cap=cap)
    return basis.dim, cert


def generic_jump_parameters(rng: SplitMix64, avec):
    """Random small parameters subject to the four genericity inequalities."""
    a0, a1, a2, a3, _ = [Fraction(x) for x in avec]
    while True:
        al = (Fraction(rng.nonzero_coeff()), Fraction(rng.nonzero_coeff()))
        be = (Fraction(rng.nonzero_coeff()), Fraction(rng.nonzero_coeff()))
        if be[0] in (a0 * al[0], a1 * al[0]):
            continue
        if be[1] in (a2 * al[1], a3 * al[1]):
            continue
        return al, be


def jump_experiment(e, trials, seed, avec=(0, 1, 2, 3, 4), cap=DEFAULT_BASIS_CAP):
    """Dimensions at the origin and at seeded random generic parameters, plus
    the recorded (never asserted) degenerate stratum beta1 = a0*alpha1."""
    if e < 5:
        raise EngineError("jump experiment needs e >= 5")
    if len(set(avec)) != 5:
        raise EngineError("diagonal coefficients must be pairwise distinct")
    rng = SplitMix64(seed)
    dim0, _ = jump_dimension(e, (0, 0), (0, 0), avec, cap)
    random_dims = []
    params = []
    for _ in range(trials):
        al, be = generic_jump_parameters(rng, avec)
        d, _ = jump_dimension(e, al, be, avec, cap)
        random_dims.append(d)
        params.append(
            {"alpha": [str(x) for x in al], "beta": [str(x) for x in be]}
        )
    a0 = Fraction(avec[0])
    alpha_deg = (Fraction(1), Fraction(1))
    beta_deg = (a0 * alpha_deg[0], Fraction(rng.nonzero_coeff()))
    while beta_deg[1] in (Fraction(avec[2]) * alpha_deg[1], Fraction(avec[3]) * alpha_deg[1]):
        beta_deg = (beta_deg[0], Fraction(rng.nonzero_coeff()))
    dim_deg, _ = jump_dimension(e, alpha_deg, beta_deg, avec, cap)
    return {
        "e": e,
        "seed": seed,
        "trials": trials,
        "avec": list(avec),
        "dim_at_origin": dim0,
        "dims_at_random_parameters": random_dims,
        "parameters": params,
        "degenerate_case": {
            "alpha": [str(x) for x in alpha_deg],
            "beta": [str(x) for x in beta_deg],
            "dim": dim_deg,
            "note": "beta1 = a0*alpha1 stratum, recorded only",
        },
    }


# ---------------------------------------------------------------------------
# optional smoothness audit (never blocks)


def jacobian_spot_check(ci: CompleteIntersectionInput, prime, seed, samples=25):
    """Probabilistic finite-field audit: at sampled chart-0 points of the
    intersection, the Jacobian of the dehomogenized equations has full rank.
    Returns a report; callers decide what to do with failures."""
    gf = PrimeField(prime)
    rng = SplitMix64(seed)
    N = ci.ambient_N
    affine = [f.dehomogenize(0) for f in ci.equations]
    jac = [[g.partial_derivative(m) for m in range(N)] for g in affine]
    found = []
    drops = []
    attempts = 0
    while len(found) < samples and attempts < 200 * samples:
        attempts += 1
        z = [rng.randint(0, prime - 1) for _ in range(N)]
        if any(g.evaluate(z, gf) != 0 for g in affine):
            continue
        found.append(z)
        rows = [[entry.evaluate(z, gf) for entry in row] for row in jac]
        from .exactalg import SparseMatrix, rank as _rank

        m = SparseMatrix.from_rows(gf, rows)
        if _rank(m) < ci.codim:
            drops.append(z)
    return {
        "prime": prime,
        "seed": seed,
        "points_on_chart": len(found),
        "attempts": attempts,
        "rank_drops": drops,
    }
