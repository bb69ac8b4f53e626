"""
Concrete acceptance criteria.
"""
import math
from typing import Dict, List

import numpy as np

from app.services.acceptance.base import AcceptanceProfile, BaseCriterion, CriterionResult
from app.services.bubbles.bubble import (
    Bubble,
    bubble_eval,
    critical_equation_residual,
    critical_exponent,
    kernel_profile,
    residual_profile,
)
from app.services.bubbles.curvature_data import product_of_spheres, random_algebraic
from app.services.bubbles.solvability import rhs_kernel_orthogonality, solvability_report
from app.services.energy.constants import get_constants
from app.services.energy.schedule import check_exponent_identities, exponent_schedule
from app.services.geometry.catalog import build_isometry, get_entry
from app.services.geometry.curvature import curvature_at, lcf_check, meets_expectation
from app.services.geometry.symmetry import symmetry_check
from app.services.reduced.maximize import hessian_check, maximize_sequential, sequential_probes
from app.services.reduced.model import build_reduced_model
from app.services.tower.config import TowerConfig
from app.services.tower.energy import flat_energy
from app.services.tower.sweep import (
    SweepSeries,
    eps_grid,
    expected_slope,
    run_sweep,
    slope_fit,
    sweep_measure,
    sweep_model,
    trim,
)

SWEEP_TOWER = {"dim": 7, "k": 2, "d": [1.0, 1.0], "eps": 1e-3}
SWEEP_RANGE = (1e-6, 1e-3)


def _sweep(profile: AcceptanceProfile, quantity: str) -> SweepSeries:
    base = TowerConfig(**SWEEP_TOWER)
    grid = eps_grid(*SWEEP_RANGE, max_points=profile.max_eps_points)
    return run_sweep(base, 2, sweep_measure(quantity, 2), grid, model=sweep_model(quantity, 2))


class BubbleIdentityCriterion(BaseCriterion):
    """-Laplacian U = U^p and the linearized kernel equations at random points."""

    number = 1
    dims = (7, 9, 11)
    points = 1000
    tolerance = 1e-9

    def get_criterion_name(self) -> str:
        return "bubble_identities"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        rng = np.random.default_rng(0)
        worst: Dict[str, Dict[str, float]] = {}
        for n in self.dims:
            bubble = Bubble(dim=n)
            p = float(critical_exponent(n))
            residuals = [residual_profile(kernel_profile(n, i), n, coordinate=i > 0) for i in range(n + 1)]
            kernels = [kernel_profile(n, i) for i in range(n + 1)]
            equation = 0.0
            kernel = 0.0
            for x in 2.0 * rng.standard_normal((self.points, n)):
                r = float(np.linalg.norm(x))
                value = float(bubble_eval(bubble, x))
                equation = max(equation, abs(critical_equation_residual(bubble, x)) / max(1.0, value ** p))
                potential = p * value ** (p - 1.0)
                for i in range(n + 1):
                    factor = 1.0 if i == 0 else float(x[i - 1])
                    scale = max(1.0, abs(potential * factor * float(kernels[i](r))))
                    kernel = max(kernel, abs(factor * float(residuals[i](r))) / scale)
            worst[str(n)] = {"equation": equation, "kernel": kernel}
        passed = all(v["equation"] <= self.tolerance and v["kernel"] <= self.tolerance for v in worst.values())
        return self.result(passed, worst_relative_residual=worst, tolerance=self.tolerance)


class ConstantIdentityCriterion(BaseCriterion):
    """int U^{p+1} = int |grad U|^2, c0 > 0 and B_N against 1/2 int U^2, at N = 7."""

    number = 2
    tolerance = 1e-8

    def get_criterion_name(self) -> str:
        return "constant_identities"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        consts = get_constants(7)
        gap = abs(consts.kn_pow - consts.grad_sq) / consts.kn_pow
        passed = gap <= self.tolerance and consts.c0 > 0.0 and consts.b_agrees
        return self.result(
            passed,
            pohozaev_gap=gap,
            c0=consts.c0,
            b_n=consts.b_n,
            b_hat=consts.b_hat,
            b_relative_discrepancy=consts.b_relative_discrepancy,
            convention_note=consts.convention_note,
        )


class InteractionOrderCriterion(BaseCriterion):
    """Slope (N-2)/2 of the consecutive interaction and convergence of its prefactor."""

    number = 3
    slope_tolerance = 0.02
    prefactor_tolerance = 0.05

    def get_criterion_name(self) -> str:
        return "interaction_order"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        series = _sweep(profile, "interaction")
        fit = slope_fit(trim(series))
        expected = expected_slope("interaction", 7)
        slope_gap = abs(fit.slope - expected) / expected
        prefactor_gap = series.values[-1].relative_difference(series.model_values[-1])
        return self.result(
            slope_gap <= self.slope_tolerance and prefactor_gap <= self.prefactor_tolerance,
            slope=fit.slope,
            expected_slope=expected,
            slope_relative_gap=slope_gap,
            prefactor_relative_gap=prefactor_gap,
            points=len(series),
        )


class NormOrderCriterion(BaseCriterion):
    """Slope (N-2)/4 of |W_2| in L^{2N/(N-2)} over the first annulus."""

    number = 4
    tolerance = 0.03

    def get_criterion_name(self) -> str:
        return "norm_order"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        fit = slope_fit(trim(_sweep(profile, "annulus-norm")))
        expected = expected_slope("annulus-norm", 7)
        gap = abs(fit.slope - expected) / expected
        return self.result(gap <= self.tolerance, slope=fit.slope, expected_slope=expected, relative_gap=gap)


class ErrorOrderCriterion(BaseCriterion):
    """The nonlinear cross-term norm decays at least like ratio^{(N+2)/4}."""

    number = 5
    margin = 0.1

    def get_criterion_name(self) -> str:
        return "error_order"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        fit = slope_fit(trim(_sweep(profile, "error")))
        bound = expected_slope("error", 7) - self.margin
        return self.result(fit.slope >= bound, slope=fit.slope, lower_bound=bound)


class FlatEnergyCriterion(BaseCriterion):
    """Flat-model energy of a two-bubble tower against its reduced model at eps = 1e-5."""

    number = 6
    tolerance = 0.1

    def get_criterion_name(self) -> str:
        return "flat_energy_expansion"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        cfg = TowerConfig(dim=7, k=2, d=[1.0, 1.0], eps=1e-5, r0=10.0)
        energy = flat_energy(cfg)
        return self.result(
            energy.relative_gap <= self.tolerance,
            relative_gap=energy.relative_gap,
            excess=energy.excess.model_dump(),
            model_excess=energy.model_excess.model_dump(),
            level_gaps=[level.relative_gap for level in energy.levels],
        )


class MaximizationCriterion(BaseCriterion):
    """Closed-form maximizers against golden section, scaled Hessian and random probes."""

    number = 7
    dims = (7, 9, 11)
    hessian_eps = 1e-3

    def get_criterion_name(self) -> str:
        return "maximization"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        cases: List[dict] = []
        for n in self.dims:
            for k in range(1, profile.max_k + 1):
                model = build_reduced_model(n, k, 1.0)
                d_star, report = maximize_sequential(model)
                hessian = hessian_check(model, d_star, self.hessian_eps)
                probes = sequential_probes(model, profile.probes, seed=k)
                cases.append({
                    "dim": n,
                    "k": k,
                    "max_relative_difference": report.max_relative_difference,
                    "negdef": hessian.negdef,
                    "probe_failures": probes.failures,
                    "passed": report.agrees and hessian.negdef and probes.passed,
                })
        return self.result(all(case["passed"] for case in cases), cases=cases)


class ExponentAlgebraCriterion(BaseCriterion):
    """theta_l = 1 + 2 gamma_l = (gamma_l - gamma_{l-1})(N-2)/2 exactly."""

    number = 8

    def get_criterion_name(self) -> str:
        return "exponent_algebra"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        failing = [n for n in range(7, 21) if not check_exponent_identities(n, 10)]
        table = [str(t) for t in exponent_schedule(7, 3).thetas]
        return self.result(not failing and table == ["2", "10", "50"], failing_dims=failing, theta_n7=table)


class GeometryOracleCriterion(BaseCriterion):
    """Weyl-norm oracles on spheres, products of spheres and an ellipsoid."""

    number = 9
    manifolds = ("round_s7", "s1_x_s6", "s3_x_s4", "s2_x_s5", "ellipsoid_4")
    samples = 20

    def get_criterion_name(self) -> str:
        return "geometry_oracle"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        outcomes = {}
        for name in self.manifolds:
            entry = get_entry(name).model_copy(update={"samples": self.samples})
            chart = entry.chart()
            report = lcf_check(chart, entry.points(chart))
            outcomes[name] = {
                "expect": entry.expect,
                "points": report.points,
                "max_weyl": report.max_weyl,
                "min_weyl": report.min_weyl,
                "passed": meets_expectation(report, entry.expect),
            }
        return self.result(all(v["passed"] for v in outcomes.values()), manifolds=outcomes)


class SymmetryOracleCriterion(BaseCriterion):
    """Point symmetries pass, a sheared reflection does not."""

    number = 10
    cases = (("round_s7", True), ("s2_x_s5", True), ("s2_shear", False))

    def get_criterion_name(self) -> str:
        return "symmetry_oracle"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        outcomes = {}
        for name, expected in self.cases:
            entry = get_entry(name)
            chart = entry.chart()
            fixed = np.asarray(entry.fixed_point) if entry.fixed_point else chart.center
            report = symmetry_check(chart, build_isometry(entry.isometry, chart, fixed), fixed, entry.points(chart))
            outcomes[name] = {
                "pullback_defect": report.max_pullback_defect,
                "differential_defect": report.differential_defect,
                "symmetric": report.passed,
                "passed": report.passed == expected,
            }
        return self.result(all(v["passed"] for v in outcomes.values()), manifolds=outcomes)


class SolvabilityCriterion(BaseCriterion):
    """Fredholm condition along psi^0 and orthogonality to psi^1..psi^N."""

    number = 11
    orthogonality_tolerance = 1e-9

    def get_criterion_name(self) -> str:
        return "solvability_pipeline"

    def evaluate(self, profile: AcceptanceProfile) -> CriterionResult:
        entry = get_entry("s2_x_s5")
        chart = entry.chart()
        sources = {
            "random_algebraic": random_algebraic(7, seed=0),
            "s2_x_s5_closed_form": product_of_spheres([2, 5]),
            "s2_x_s5_from_metric": curvature_at(chart, chart.center).to_curvature_data(),
        }
        outcomes = {}
        for name, data in sources.items():
            report = solvability_report(data)
            orthogonality = float(np.max(np.abs(rhs_kernel_orthogonality(data))))
            outcomes[name] = {
                "nu": report.nu,
                "fredholm_residual": report.fredholm_residual,
                "fredholm_bound": report.fredholm_bound,
                "max_kernel_pairing": orthogonality,
                "passed": report.passed and orthogonality <= self.orthogonality_tolerance and math.isfinite(report.nu),
            }
        return self.result(all(v["passed"] for v in outcomes.values()), sources=outcomes)


def default_criteria() -> List[BaseCriterion]:
    return [
        BubbleIdentityCriterion(),
        ConstantIdentityCriterion(),
        InteractionOrderCriterion(),
        NormOrderCriterion(),
        ErrorOrderCriterion(),
        FlatEnergyCriterion(),
        MaximizationCriterion(),
        ExponentAlgebraCriterion(),
        GeometryOracleCriterion(),
        SymmetryOracleCriterion(),
        SolvabilityCriterion(),
    ]
