"""Verification batteries: each suite checks one family of identities on seeded random inputs."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from app.config import config
from app.estimate.matsaev import matsaev_check
from app.estimate.pnorm import amplified_ratio, pq_norm_lower
from app.estimate.truncation import is_increasing, schur_limit_criterion, truncation_growth
from app.groups.algebra import (
    GroupAlgebra,
    build_algebra,
    fourier_multiplier,
    kernel_positive_type_gram,
    multiplier_polynomial,
    project_fourier,
    project_schur,
    random_decomposable_symbol,
    random_positive_definite_symbol,
    schur_multiplier,
    triangular_symbol,
)
from app.groups.finite_group import bicharacter_cocycle, cyclic_group, direct_product, symmetric_group
from app.lab.loader import map_to_dict
from app.lab.randomness import (
    random_coboundary,
    random_cp_map,
    random_map,
    random_polynomial,
    random_rectangular,
    random_schur_symbol,
    random_selfadjoint_map,
    random_unitary_images,
)
from app.lab.sample_data import UNITARY_ROW_NORMS, unitary_row
from app.linalg.core import INF, schatten_norm
from app.linalg.streams import generator, ginibre
from app.models.schemas import AssertionRecord, SdpSolutionRecord
from app.sdp.norms import (
    cb_norm_inf,
    dec_norm_from_commutative,
    dec_norm_inf,
    dec_norm_one,
    dec_norm_selfadjoint,
    property_P_witness,
    schur_cb_norm,
)
from app.sdp.problem import SdpOptions, SdpSolution
from app.superop.positivity import contraction_block, is_cp, is_psd, modulus_block_check
from app.superop.superoperator import (
    SuperOperator,
    adjoint,
    commutative_map,
    liouville,
    opposite,
    tilde,
    trace_map,
    transpose_map,
    unitary_row_map,
)

logger = logging.getLogger(__name__)

QUICK_TRIALS = 2
CB_DEC_TRIALS = 100


def significant(x: float, digits: Optional[int] = None) -> float:
    """Round to the report precision so replays compare equal."""
    digits = digits or config.REPORT_PRECISION
    if x is None or not math.isfinite(x) or x == 0.0:
        return x
    return float(f"{x:.{digits}g}")


@dataclass(frozen=True)
class LabContext:
    """Settings shared by every battery of one CLI invocation."""
    seed: int = config.LAB_SEED
    trials: Optional[int] = None
    restarts: int = config.LAB_RESTARTS
    tol_scale: float = config.LAB_TOL_SCALE
    options: SdpOptions = field(default_factory=SdpOptions)
    quick: bool = False

    def rng(self, suite: str, trial: int) -> np.random.Generator:
        return generator(self.seed, suite, trial)

    def tol(self, base: float) -> float:
        return base * self.tol_scale

    def count(self, default: Optional[int] = None) -> int:
        """Trials for a battery: the --trials flag, else the battery default, clamped in quick mode."""
        n = self.trials if self.trials is not None else (default or config.LAB_TRIALS)
        return min(n, QUICK_TRIALS) if self.quick else n


class Battery:
    """Collects assertions, tables and solver snapshots for one suite."""

    def __init__(self, suite: str, ctx: LabContext):
        self.suite = suite
        self.ctx = ctx
        self.assertions: List[AssertionRecord] = []
        self.results: Dict[str, Any] = {}
        self.tables: Dict[str, List[Dict[str, Any]]] = {}
        self.solutions: List[SdpSolutionRecord] = []

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def keep(self, solution: SdpSolution) -> None:
        self.solutions.append(solution.to_record())

    def check(
        self,
        name: str,
        claim: str,
        passed: bool,
        observed: Optional[float] = None,
        expected: Optional[float] = None,
        tolerance: Optional[float] = None,
        witness: Optional[SuperOperator] = None,
        **details,
    ) -> bool:
        if not passed and witness is not None:
            details["witness"] = map_to_dict(witness)
        record = AssertionRecord(
            suite=self.suite,
            name=name,
            claim=claim,
            passed=bool(passed),
            observed=None if observed is None else significant(float(observed)),
            expected=None if expected is None else significant(float(expected)),
            tolerance=tolerance,
            details=details,
        )
        self.assertions.append(record)
        if passed:
            logger.info(f"[{self.suite}] {name}: ok")
        else:
            logger.error(f"[{self.suite}] {name} FAILED: observed={observed} expected={expected} tol={tolerance}")
        return bool(passed)

    def close(self, name: str, claim: str, observed: float, expected: float, tolerance: float, **kwargs) -> bool:
        return self.check(name, claim, abs(observed - expected) <= tolerance, observed, expected, tolerance, **kwargs)

    def worst(
        self,
        name: str,
        claim: str,
        excesses: Sequence[float],
        tolerance: float,
        witnesses: Optional[Sequence[SuperOperator]] = None,
    ) -> bool:
        """Pass when every per-trial relative excess is within tolerance; reports the worst trial."""
        if not excesses:
            return self.check(name, claim, True, details_note="no trials")
        idx = int(np.argmax(excesses))
        witness = witnesses[idx] if witnesses is not None else None
        return self.check(
            name,
            claim,
            max(excesses) <= tolerance,
            observed=max(excesses),
            expected=0.0,
            tolerance=tolerance,
            witness=witness,
            trials=len(excesses),
            worst_trial=idx,
        )


def _rel_gap(a: float, b: float) -> float:
    return abs(a - b) / (1.0 + abs(b))


def _rel_excess(value: float, bound: float) -> float:
    """How far value exceeds bound, relative to the bound."""
    return max(0.0, value - bound) / (1.0 + abs(bound))


# dec-axioms


def suite_dec_axioms(ctx: LabContext) -> Battery:
    """Norm axioms, duality, opposite and tilde invariance of the decomposable norm."""
    bat = Battery("dec-axioms", ctx)
    opts = ctx.options
    tol = ctx.tol(1e-6)

    for n in (2, 3):
        t = transpose_map(n)
        dec = dec_norm_inf(t, opts)
        cb = cb_norm_inf(t, opts)
        bat.keep(dec.solution)
        bat.keep(cb.solution)
        bat.close(f"transpose_dec_M{n}", f"||transpose on M_{n}||_dec = {n}", dec.value, n, ctx.tol(1e-4))
        bat.close(f"transpose_cb_M{n}", f"||transpose on M_{n}||_cb = {n}", cb.value, n, ctx.tol(1e-4))

    tr = trace_map(2, 1)
    bat.close("trace_dec_inf", "the trace M_2 -> C has dec norm tr(I) = 2", dec_norm_inf(tr, opts).value, 2.0, tol)
    bat.close("trace_dec_one", "the trace S^1_2 -> C has dec norm 1", dec_norm_one(tr, opts).value, 1.0, tol)

    checks: Dict[str, List[float]] = {k: [] for k in (
        "homogeneity", "triangle", "composition", "duality", "opposite", "cb_leq_dec", "tilde", "selfadjoint_forms",
    )}
    witnesses: Dict[str, List[SuperOperator]] = {k: [] for k in checks}

    def note(key: str, excess: float, witness: SuperOperator) -> None:
        checks[key].append(excess)
        witnesses[key].append(witness)

    for trial in range(ctx.count()):
        rng = ctx.rng(bat.suite, trial)
        n = 2 + trial % 2
        t, s = random_map(rng, n), random_map(rng, n)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        dt = dec_norm_inf(t, opts).value
        ds = dec_norm_inf(s, opts).value

        note("homogeneity", _rel_gap(dec_norm_inf(t * alpha, opts).value, abs(alpha) * dt), t)
        note("triangle", _rel_excess(dec_norm_inf(t + s, opts).value, dt + ds), t)
        note("composition", _rel_excess(dec_norm_inf(t @ s, opts).value, dt * ds), t)
        note("duality", _rel_gap(dec_norm_one(adjoint(t), opts).value, dt), t)
        note("opposite", _rel_gap(dec_norm_inf(opposite(t), opts).value, dt), t)

        small = t if n == 2 else random_map(rng, 2)
        d_small = dt if n == 2 else dec_norm_inf(small, opts).value
        note("tilde", _rel_gap(dec_norm_inf(tilde(small), opts).value, d_small), small)

        u = random_selfadjoint_map(rng, n)
        note("selfadjoint_forms", _rel_gap(dec_norm_selfadjoint(u, opts).value, dec_norm_inf(u, opts).value), u)

    for trial in range(ctx.count(CB_DEC_TRIALS)):
        rng = ctx.rng(f"{bat.suite}/cb", trial)
        t = random_map(rng, 2 + trial % 2)
        note("cb_leq_dec", _rel_excess(cb_norm_inf(t, opts).value, dec_norm_inf(t, opts).value), t)

    claims = {
        "homogeneity": "||a T||_dec = |a| ||T||_dec",
        "triangle": "||T + S||_dec <= ||T||_dec + ||S||_dec",
        "composition": "||T o S||_dec <= ||T||_dec ||S||_dec",
        "duality": "||T*||_dec on S^1 = ||T||_dec on M_n",
        "opposite": "||T°||_dec = ||T||_dec",
        "cb_leq_dec": "||T||_cb <= ||T||_dec",
        "tilde": "||[[0, T], [T°, 0]]||_dec = ||T||_dec",
        "selfadjoint_forms": "for selfadjoint T, ||T||_dec = min ||S|| over -S <=_cp T <=_cp S",
    }
    for key, claim in claims.items():
        bat.worst(key, claim, checks[key], tol, witnesses[key])
    return bat


# projections


def _projection_algebras() -> Dict[str, GroupAlgebra]:
    klein = direct_product(cyclic_group(2), cyclic_group(2))
    return {
        "Z4": build_algebra(cyclic_group(4)),
        "Z2xZ2[pauli]": build_algebra(klein, bicharacter_cocycle(2, klein)),
    }


def suite_projections(ctx: LabContext) -> Battery:
    """Schur and Fourier projections are idempotent, CP-preserving and cb-contractive."""
    bat = Battery("projections", ctx)
    opts = ctx.options
    algebras = _projection_algebras()
    z4 = algebras["Z4"]
    half = [0, 2]

    idem, cp_fail, contract = [], [], []
    cp_witnesses, contract_witnesses = [], []
    for trial in range(ctx.count()):
        rng = ctx.rng(bat.suite, trial)
        t = random_cp_map(rng, 3)
        a = project_schur(t)
        idem.append(float(np.max(np.abs(project_schur(schur_multiplier(a)) - a))))
        cert = is_cp(schur_multiplier(a))
        cp_fail.append(max(0.0, -cert.min_eigenvalue - cert.tolerance))
        cp_witnesses.append(t)
        contract.append(_rel_excess(schur_cb_norm(a, opts).value, cb_norm_inf(t, opts).value))
        contract_witnesses.append(t)

        for name, alg in algebras.items():
            t = random_cp_map(rng, alg.order)
            subgroups = [None, half] if alg is z4 else [None]
            for h in subgroups:
                phi = project_fourier(alg, t, subgroup=h)
                m_phi = fourier_multiplier(alg, phi)
                idem.append(float(np.max(np.abs(project_fourier(alg, m_phi, subgroup=h) - phi))))
                cert = is_cp(m_phi)
                cp_fail.append(max(0.0, -cert.min_eigenvalue - cert.tolerance))
                cp_witnesses.append(t)
            phi = project_fourier(alg, t)
            contract.append(_rel_excess(cb_norm_inf(fourier_multiplier(alg, phi), opts).value, cb_norm_inf(t, opts).value))
            contract_witnesses.append(t)

    bat.worst("idempotent", "P(P(T)) = P(T) for the Schur and Fourier projections", idem, 1e-12)
    bat.worst("cp_preserving", "T completely positive => P(T) completely positive", cp_fail, 0.0, cp_witnesses)
    bat.worst("cb_contractive", "||P(T)||_cb <= ||T||_cb", contract, ctx.tol(1e-6), contract_witnesses)
    return bat


# cocycle


def _cocycle_pairs(rng: np.random.Generator) -> Dict[str, tuple]:
    klein = direct_product(cyclic_group(2), cyclic_group(2))
    z4 = cyclic_group(4)
    return {
        "Z2xZ2[pauli]": (build_algebra(klein, bicharacter_cocycle(2, klein)), build_algebra(klein)),
        "Z4[coboundary]": (build_algebra(z4, random_coboundary(z4, rng)), build_algebra(z4)),
    }


def _sample_symbol(alg: GroupAlgebra, rng: np.random.Generator, trial: int) -> np.ndarray:
    kind = trial % 3
    if kind == 0:
        return random_positive_definite_symbol(alg.group, rng)
    if kind == 1:
        return random_decomposable_symbol(alg.group, rng)
    return ginibre(rng, alg.order, 1)[:, 0]


def suite_cocycle(ctx: LabContext) -> Battery:
    """CP status and cb norm of a Fourier multiplier do not depend on the cocycle."""
    bat = Battery("cocycle", ctx)
    opts = ctx.options
    pairs = _cocycle_pairs(ctx.rng(bat.suite, -1))
    twisted, _ = pairs["Z2xZ2[pauli]"]
    bat.check(
        "pauli_factor",
        "the Pauli-twisted algebra of Z2xZ2 is a factor (trivial centre)",
        twisted.center_dimension() == 1,
        observed=twisted.center_dimension(),
        expected=1,
    )

    for name, (twisted, plain) in pairs.items():
        mismatches, gaps, witnesses = 0, [], []
        for trial in range(ctx.count(20)):
            rng = ctx.rng(bat.suite, f"{name}/{trial}")
            phi = _sample_symbol(plain, rng, trial)
            t_sigma = fourier_multiplier(twisted, phi)
            t_plain = fourier_multiplier(plain, phi)
            if bool(is_cp(t_sigma)) != bool(is_cp(t_plain)):
                mismatches += 1
            gaps.append(abs(cb_norm_inf(t_sigma, opts).value - cb_norm_inf(t_plain, opts).value))
            witnesses.append(t_sigma)
        bat.check(f"cp_status[{name}]", "M_phi is CP on VN(G, sigma) iff it is CP on VN(G)", mismatches == 0,
                  observed=mismatches, expected=0)
        bat.worst(f"cb_norm[{name}]", "||M_phi||_cb on VN(G, sigma) = ||M_phi||_cb on VN(G)", gaps,
                  ctx.tol(1e-5), witnesses)
    return bat


# schur-dec

SCHUR_DEC_SIZES = (2, 3, 4)
SCHUR_DEC_LARGE_SIZES = (5, 6, 7, 8)


def schur_dec_schedule(trials: int, quick: bool) -> List[int]:
    """Symbol sizes for the schur-dec battery: small sizes in rotation, one symbol at each large size last."""
    large = () if quick else SCHUR_DEC_LARGE_SIZES[:trials]
    small = [SCHUR_DEC_SIZES[k % len(SCHUR_DEC_SIZES)] for k in range(trials - len(large))]
    return small + list(large)


def suite_schur_dec(ctx: LabContext) -> Battery:
    """The decomposable norm of a Schur multiplier equals its factorisation norm."""
    bat = Battery("schur-dec", ctx)
    opts = ctx.options
    gaps, witnesses = [], []
    sizes = schur_dec_schedule(ctx.count(20), ctx.quick)
    for trial, n in enumerate(sizes):
        rng = ctx.rng(bat.suite, trial)
        a = random_schur_symbol(rng, n, real=n > 3)
        m_a = schur_multiplier(a)
        gaps.append(abs(dec_norm_inf(m_a, opts).value - schur_cb_norm(a, opts).value))
        witnesses.append(m_a)
    bat.worst("dec_equals_schur", "||M_A||_dec = ||M_A||_cb = min max(P_ii, Q_jj)", gaps, ctx.tol(1e-5), witnesses)
    bat.results["schur_dec_sizes"] = sizes
    return bat


# modulus


def suite_modulus(ctx: LabContext) -> Battery:
    """[[|B|, B], [B°, |B|]] is CP and ||T||_dec = || |B| || between commutative algebras."""
    bat = Battery("modulus", ctx)
    opts = ctx.options
    defects, block_defects, witnesses = [], [], []
    for trial in range(ctx.count(50)):
        rng = ctx.rng(bat.suite, trial)
        b = random_rectangular(rng, 6)
        cert = modulus_block_check(b)
        defects.append(max(0.0, -cert.min_eigenvalue))
        witnesses.append(commutative_map(b))
        contraction = b / max(schatten_norm(b, INF), 1e-300)
        block_defects.append(max(0.0, -is_psd(contraction_block(contraction)).min_eigenvalue))
    bat.worst("modulus_block_cp", "[[|B|, B], [B°, |B|]] is completely positive", defects, ctx.tol(1e-8), witnesses)
    bat.worst("contraction_block_psd", "[[|b*|, b], [b*, |b|]] >= 0 for ||b|| <= 1", block_defects, ctx.tol(1e-8))

    gaps, dec_witnesses = [], []
    for trial in range(ctx.count(5)):
        rng = ctx.rng(bat.suite, f"dec/{trial}")
        b = random_rectangular(rng, 3)
        expected = float(np.max(np.sum(np.abs(b), axis=1)))
        gaps.append(_rel_gap(dec_norm_inf(commutative_map(b), opts).value, expected))
        dec_witnesses.append(commutative_map(b))
    bat.worst("dec_is_modulus_norm", "||T||_dec = || |T| || = max_i sum_j |b_ij|", gaps, ctx.tol(1e-6), dec_witnesses)
    return bat


# property-p


def suite_property_p(ctx: LabContext) -> Battery:
    """Contractively decomposable selfadjoint multipliers admit unital CP block extensions."""
    bat = Battery("property-p", ctx)
    opts = ctx.options
    for alg in (build_algebra(cyclic_group(4)), build_algebra(symmetric_group(3))):
        missing, gram_defects = [], []
        for trial in range(ctx.count(20)):
            rng = ctx.rng(bat.suite, f"{alg.name}/{trial}")
            phi = random_decomposable_symbol(alg.group, rng)
            witness = property_P_witness(alg, phi, options=opts)
            if witness is None:
                missing.append(trial)
                continue
            bat.keep(witness.solution)
            symbols = [[witness.psi1, phi], [phi, witness.psi2]]
            points = [(i, s) for i in range(2) for s in range(alg.order)]
            gram = kernel_positive_type_gram(alg, symbols, points)
            lam_min = float(np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))[0])
            gram_defects.append(max(0.0, -lam_min))
        bat.check(
            f"witness_found[{alg.name}]",
            "a unital selfadjoint CP block extension [[M_psi1, M_phi], [M_phi, M_psi2]] exists",
            not missing,
            observed=len(missing),
            expected=0,
            inconclusive_trials=missing,
        )
        bat.worst(
            f"kernel_positive_type[{alg.name}]",
            "the 2x2 kernel [[psi1, phi], [phi, psi2]] is of positive type",
            gram_defects,
            ctx.tol(1e-6) * alg.order,
        )
    return bat


# matsaev

MATSAEV_EXTRA_P = (1.5, 3.0)


def _matsaev_algebras() -> List[GroupAlgebra]:
    klein = direct_product(cyclic_group(2), cyclic_group(2))
    return [
        build_algebra(cyclic_group(4)),
        build_algebra(symmetric_group(3)),
        build_algebra(klein, bicharacter_cocycle(2, klein)),
    ]


def _matsaev_row(alg: GroupAlgebra, report, trial: int) -> Dict[str, Any]:
    return {
        "group": alg.name,
        "trial": trial,
        "p": "inf" if report.p == INF else report.p,
        "degree": report.polynomial.degree,
        "lhs": significant(report.lhs_max),
        "rhs_circle": significant(report.rhs_circle),
        "rhs_shift": significant(report.rhs_shift.value),
        "margin_circle": significant(report.margins["circle"]),
        "margin_shift": significant(report.margins["shift"]),
    }


def suite_matsaev(ctx: LabContext) -> Battery:
    """||P(M_phi)|| <= sup_{|z|=1} |P(z)| at p = 2, with estimates reported at other p."""
    bat = Battery("matsaev", ctx)
    algebras = _matsaev_algebras()
    rows, excess, exactness = [], [], []
    for trial in range(ctx.count(50)):
        rng = ctx.rng(bat.suite, trial)
        alg = algebras[trial % len(algebras)]
        phi = random_decomposable_symbol(alg.group, rng)
        poly = random_polynomial(rng)
        report = matsaev_check(alg, phi, poly, p=2.0, degrees=(1,), seed=ctx.seed, restarts=ctx.restarts)
        direct = float(np.max(np.abs(multiplier_polynomial(phi, poly.coefficients))))
        excess.append(max(0.0, report.lhs_max - report.rhs_circle))
        exactness.append(abs(report.lhs_max - direct))
        rows.append(_matsaev_row(alg, report, trial))

    bat.worst("von_neumann_p2", "max_s |P(phi(s))| <= sup_{|z|=1} |P(z)|", excess, ctx.tol(1e-8))
    bat.worst("p2_exact", "the S^2 estimate equals max_s |P(phi(s))|", exactness, 1e-9)

    if not ctx.quick:
        restarts = min(ctx.restarts, 16)
        for trial in range(3):
            rng = ctx.rng(bat.suite, f"extra/{trial}")
            alg = algebras[trial % len(algebras)]
            phi = random_decomposable_symbol(alg.group, rng)
            poly = random_polynomial(rng, max_degree=3)
            for p in MATSAEV_EXTRA_P:
                report = matsaev_check(alg, phi, poly, p=p, degrees=(1, 2), seed=ctx.seed, restarts=restarts)
                rows.append(_matsaev_row(alg, report, trial))
    bat.tables["matsaev"] = rows
    return bat


# truncation

TRUNCATION_SIZES = (2, 4, 8, 16, 32, 64)
QUICK_TRUNCATION_SIZES = (2, 4, 8, 16)


def suite_truncation(ctx: LabContext) -> Battery:
    """Growth of the triangular truncation on B(l^2_n) and its iterated-limit gap."""
    bat = Battery("truncation", ctx)
    sizes = QUICK_TRUNCATION_SIZES if ctx.quick else TRUNCATION_SIZES
    rows = truncation_growth(sizes, ctx.options)
    bat.tables["truncation"] = [
        {
            "n": r.n,
            "norm": significant(r.norm),
            "sqrt_bound": significant(r.sqrt_bound),
            "p2_norm": significant(r.p2_norm),
            "certified": r.certified,
        }
        for r in rows
    ]
    bat.check(
        "strictly_increasing",
        "n -> ||triangular truncation on B(l^2_n)|| is strictly increasing",
        is_increasing(rows),
        observed=rows[-1].norm,
        sizes=list(sizes),
    )
    worst = max(r.norm - r.sqrt_bound for r in rows)
    bat.check(
        "sqrt_n_bound",
        "||M_A||_inf <= sqrt(n) ||M_A||_2 for the triangular symbol",
        all(r.within_bound for r in rows),
        observed=worst,
        expected=0.0,
    )
    crit = schur_limit_criterion(triangular_symbol(16), [10, 12, 14], [10, 12, 14])
    bat.close(
        "limit_gap",
        "lim_i lim_j a_ij - lim_j lim_i a_ij = 1 for the triangular symbol",
        crit.gap,
        1.0,
        1e-12,
        s=crit.s.real,
        t=crit.t.real,
    )
    bat.results["truncation_max_norm"] = significant(rows[-1].norm)
    return bat


# amplified-norm

AMPLIFIED_P = (1.5, 2.0, 3.0, INF)
AMPLIFIED_MAX_DEGREE = 4


def _amplified_algebras(quick: bool) -> List[GroupAlgebra]:
    small = [build_algebra(cyclic_group(2)), build_algebra(cyclic_group(3))]
    if quick:
        return small
    klein = direct_product(cyclic_group(2), cyclic_group(2))
    return small + [build_algebra(cyclic_group(4)), build_algebra(klein, bicharacter_cocycle(2, klein))]


def suite_amplified_norm(ctx: LabContext) -> Battery:
    """Amplified Schatten lower bounds stay below the decomposable norm and are exact at p = 2."""
    bat = Battery("amplified-norm", ctx)
    opts = ctx.options
    algebras = _amplified_algebras(ctx.quick)
    restarts = min(ctx.restarts, 2 if ctx.quick else 8)
    max_degree = 2 if ctx.quick else AMPLIFIED_MAX_DEGREE
    max_iter = 40 if ctx.quick else 120
    excess, exactness, witnesses, rows = [], [], [], []
    for trial in range(ctx.count(20)):
        rng = ctx.rng(bat.suite, trial)
        alg = algebras[trial % len(algebras)]
        m_phi = fourier_multiplier(alg, _sample_symbol(alg, rng, trial))
        d = 1 + (trial + trial // len(algebras)) % max_degree
        dec = dec_norm_inf(m_phi, opts).value
        for p in AMPLIFIED_P:
            est = pq_norm_lower(m_phi, p, d=d, restarts=restarts, seed=ctx.seed, algebra=alg, max_iter=max_iter)
            excess.append(_rel_excess(est.value, dec))
            witnesses.append(m_phi)
            if p == 2.0:
                top = float(np.linalg.norm(liouville(m_phi), 2))
                exactness.append(max(abs(est.value - top), abs(amplified_ratio(m_phi, est.witness, p, d) - top)))
            rows.append({
                "group": alg.name,
                "trial": trial,
                "p": "inf" if p == INF else p,
                "d": d,
                "estimate": significant(est.value),
                "dec": significant(dec),
            })
    bat.worst("below_dec", "||Id_d (x) M_phi||_{S^p -> S^p} <= ||M_phi||_dec", excess, ctx.tol(1e-6), witnesses)
    bat.worst("p2_exact", "the S^2 estimate is the top singular value of the Liouville matrix", exactness, 1e-9)

    unit_gaps, cp_witnesses = [], []
    for trial in range(ctx.count(10)):
        rng = ctx.rng(bat.suite, f"cp/{trial}")
        t = random_cp_map(rng, 2 + trial % 2)
        est = pq_norm_lower(t, INF, restarts=restarts, seed=ctx.seed, max_iter=max_iter)
        unit_gaps.append(_rel_gap(est.value, schatten_norm(t(np.eye(t.in_dim)), INF)))
        cp_witnesses.append(t)
    bat.worst("cp_unit_attains", "for CP T the operator norm is ||T(1)||", unit_gaps, 1e-9, cp_witnesses)
    bat.tables["amplified"] = rows
    return bat


# unitary-row


def suite_unitary_row(ctx: LabContext) -> Battery:
    """e_k -> u_k on l^inf_n: dec norm n for the Pauli and clock/shift rows."""
    bat = Battery("unitary-row", ctx)
    opts = ctx.options
    for n, expected in UNITARY_ROW_NORMS.items():
        t = unitary_row(n)
        res = dec_norm_from_commutative(t, opts)
        bat.keep(res.solution)
        bat.close(f"dec_row_{n}", f"||e_k -> u_k||_dec = n^(1-1/p) = {n} at p = inf", res.value, expected, ctx.tol(1e-4))
        full = dec_norm_inf(t, opts)
        bat.close(f"dec_full_{n}", "the M_n and l^inf_n programs agree", full.value, res.value, ctx.tol(1e-5))
        cb = cb_norm_inf(t, opts)
        bat.check(f"cb_leq_dec_{n}", "||T||_cb <= ||T||_dec", cb.value <= res.value + ctx.tol(1e-6),
                  observed=cb.value, expected=res.value)
        bat.results[f"dec_row_{n}"] = significant(res.value)
        bat.results[f"cb_row_{n}"] = significant(cb.value)

    excess, witnesses = [], []
    for trial in range(ctx.count(10)):
        rng = ctx.rng(bat.suite, trial)
        k = 2 + trial % 2
        us = random_unitary_images(rng, k, 2)
        t = unitary_row_map(us)
        value = dec_norm_from_commutative(t, opts).value
        lower = schatten_norm(sum(us), INF)
        excess.append(max(_rel_excess(value, float(k)), _rel_excess(lower, value)))
        witnesses.append(t)
    bat.worst("random_rows_bounds", "||sum u_k|| <= ||e_k -> u_k||_dec <= k", excess, ctx.tol(1e-6), witnesses)
    return bat


SUITES: Dict[str, Callable[[LabContext], Battery]] = {
    "dec-axioms": suite_dec_axioms,
    "projections": suite_projections,
    "cocycle": suite_cocycle,
    "schur-dec": suite_schur_dec,
    "modulus": suite_modulus,
    "property-p": suite_property_p,
    "matsaev": suite_matsaev,
    "truncation": suite_truncation,
    "amplified-norm": suite_amplified_norm,
    "unitary-row": suite_unitary_row,
}
