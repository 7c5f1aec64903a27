import dataclasses
import json
from typing import Iterable, List

import torch
from cyy_naive_lib.log import get_logger

from critical_catalog import (enumerate_families, materialize,
                              sample_continuum, trap_report)
from fidelity_landscape import (TargetGate, ambient_gradient, classify,
                                criticality_residual, fidelity,
                                fidelity_increment, hessian_matrix,
                                hessian_quadratic, least_squares_cost,
                                sun_fidelity_gradient)
from landscape_type import (CriticalNature, LandscapeError, NotCriticalError,
                            NotTangentError, ProbeVerdict)
from matrix_core import frobenius_norm, trace
from sun_geometry import (ALGEBRA_TOL, SpecialUnitaryPoint, TangentDirection,
                          UnitaryPoint, ambient_metric, check_n, f_hw,
                          f_hw_differential, grad_f_hw, hess_f_hw_quadratic,
                          make_generator, random_direction,
                          random_special_unitary, random_unitary, sun_basis,
                          sun_gradient, sun_gradient_by_engine,
                          unitary_geodesic)

CRITICAL_TOL = 1e-8
NEAR_ZERO = 1e-8
GRADIENT_TOL = 1e-6
HESSIAN_TOL = 1e-4
HESSIAN_ABS_TOL = 1e-6
PROBE_RADIUS = 0.1
PROBE_SAMPLES = 2000
SUITES = ("gradient", "hessian", "catalog", "traps")


@dataclasses.dataclass
class VerificationRecord:
    test: str
    n: int
    status: str
    details: dict

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        return dataclasses.asdict(self)


def _record(test: str, n: int, passed: bool, **details) -> VerificationRecord:
    record = VerificationRecord(test, n, "pass" if passed else "fail", details)
    if passed:
        get_logger().debug("%s n=%s passed %s", test, n, details)
    else:
        get_logger().error("%s n=%s failed %s", test, n, details)
    return record


def _relative_error(approx: float, exact: float) -> float:
    error = abs(approx - exact)
    if abs(exact) < NEAR_ZERO:
        return error
    return error / abs(exact)


def _require_traceless(direction: TangentDirection) -> None:
    scale = max(1.0, frobenius_norm(direction.omega))
    if abs(trace(direction.omega)) > ALGEBRA_TOL * scale:
        raise NotTangentError("direction is not tangent to SU(N), it has a trace")


def _require_critical(a: TargetGate, s: SpecialUnitaryPoint) -> None:
    _, residual = criticality_residual(a, s)
    if residual > CRITICAL_TOL:
        raise NotCriticalError("point is not critical, residual " + str(residual))


def fd_gradient_check(
    a: TargetGate, s: SpecialUnitaryPoint, direction: TangentDirection, h: float = 1e-5
) -> float:
    """
    Central difference of the fidelity along exp(t Omega) S against the
    metric pairing of the SU(N) gradient with Omega S
    """
    if not 1e-7 <= h <= 1e-3:
        raise LandscapeError("gradient check step must lie in [1e-7, 1e-3]:" + str(h))
    check_n(a, s, direction)
    _require_traceless(direction)
    fd = (
        fidelity_increment(a, s, direction, h) - fidelity_increment(a, s, direction, -h)
    ) / (2 * h)
    exact = ambient_metric(sun_fidelity_gradient(a, s), direction.omega @ s.matrix)
    return _relative_error(fd, exact)


def fd_hessian_check(
    a: TargetGate, s: SpecialUnitaryPoint, direction: TangentDirection, h: float = 1e-3
) -> float:
    if not 1e-4 <= h <= 1e-2:
        raise LandscapeError("hessian check step must lie in [1e-4, 1e-2]:" + str(h))
    check_n(a, s, direction)
    _require_traceless(direction)
    _require_critical(a, s)
    fd = (
        fidelity_increment(a, s, direction, h) + fidelity_increment(a, s, direction, -h)
    ) / (h * h)
    return _relative_error(fd, hessian_quadratic(a, s, direction))


def saddle_probe(
    a: TargetGate, s: SpecialUnitaryPoint, radius: float, samples: int, seed: int
) -> tuple:
    """
    Extreme values of f(exp(Omega) S) - f(S) over random traceless Omega
    with metric norm uniform in (0, radius]
    """
    if radius <= 0:
        raise LandscapeError("probe radius must be positive")
    if samples < 100:
        raise LandscapeError("probe needs at least 100 samples")
    check_n(a, s)
    _require_critical(a, s)
    generator = make_generator(seed)
    min_delta = float("inf")
    max_delta = float("-inf")
    for _ in range(samples):
        u = torch.rand(1, dtype=torch.float64, generator=generator).item()
        direction = random_direction(s.n, generator, norm=radius * (1 - u))
        delta = fidelity_increment(a, s, direction, 1.0)
        min_delta = min(min_delta, delta)
        max_delta = max(max_delta, delta)
    return min_delta, max_delta


def probe_verdict(min_delta: float, max_delta: float, n: int) -> ProbeVerdict:
    eps = 1e-12 * n
    if min_delta < -eps and max_delta > eps:
        return ProbeVerdict.Saddle
    if max_delta <= eps and min_delta < -eps:
        return ProbeVerdict.LocalMax
    if min_delta >= -eps and max_delta > eps:
        return ProbeVerdict.LocalMin
    return ProbeVerdict.Flat


def _random_conjugator(n: int, generator: torch.Generator) -> UnitaryPoint:
    return UnitaryPoint(random_unitary(n, generator))


def continuum_curve_check(n: int, u: UnitaryPoint, samples: int) -> VerificationRecord:
    """
    Along mu -> S_{n/2,mu}(U) every point is critical with value 0, and
    interior points have Hessians of both signs
    """
    if n % 4 != 0:
        raise LandscapeError("continuum families exist only for n divisible by 4")
    family = next(f for f in enumerate_families(n) if f.is_continuum)
    identity_target = TargetGate.identity(n)
    basis = sun_basis(n)
    max_residual = 0.0
    max_value = 0.0
    not_mixed = []
    for mu in sample_continuum(samples):
        point = materialize(family, u, mu).s
        _, residual = criticality_residual(identity_target, point)
        max_residual = max(max_residual, residual)
        max_value = max(max_value, abs(fidelity(identity_target, point)))
        if abs(mu) < 2 and not hessian_matrix(identity_target, point, basis).is_mixed:
            not_mixed.append(mu)
    return _record(
        "continuum_curve",
        n,
        max_residual <= 1e-10 and max_value <= 1e-12 and not not_mixed,
        max_residual=max_residual,
        max_abs_value=max_value,
        not_mixed=not_mixed,
    )


def trap_boundary_test(n_range: Iterable[int], seed: int = 0) -> List[VerificationRecord]:
    """
    No traps below n = 5 and at least one from n = 5 on, each trap confirmed
    by a definite Hessian and a one-sided saddle probe
    """
    records = []
    for n in n_range:
        if n < 2:
            raise LandscapeError("n must be at least 2")
        traps = trap_report(n)
        generator = make_generator(seed + n)
        identity_target = TargetGate.identity(n)
        offending = []
        for family in traps:
            point = materialize(family, _random_conjugator(n, generator)).s
            spectrum = hessian_matrix(identity_target, point, sun_basis(n))
            verdict = probe_verdict(
                *saddle_probe(identity_target, point, PROBE_RADIUS, 200, seed + n), n
            )
            if family.nature == CriticalNature.LocalMaxNotGlobal:
                confirmed = (
                    spectrum.n_neg == n * n - 1 and verdict == ProbeVerdict.LocalMax
                )
            else:
                confirmed = (
                    spectrum.n_pos == n * n - 1 and verdict == ProbeVerdict.LocalMin
                )
            if not confirmed:
                offending.append(family.label)
        records.append(
            _record(
                "trap_boundary",
                n,
                bool(traps) == (n >= 5) and not offending,
                trap_count=len(traps),
                trap_values=[family.value for family in traps],
                offending=offending,
            )
        )
    return records


def catalog_exactness_check() -> VerificationRecord:
    expected = [
        (3, 0.0, 3.0, CriticalNature.GlobalMax),
        (1, 0.0, -1.0, CriticalNature.Saddle),
        (0, -(3 ** 0.5), -1.5, CriticalNature.GlobalMin),
        (0, 3 ** 0.5, -1.5, CriticalNature.GlobalMin),
    ]
    families = enumerate_families(3)
    got = sorted(
        ((f.kplus, f.mu, f.value, f.nature) for f in families),
        key=lambda t: (-t[0], t[1]),
    )
    passed = len(got) == len(expected) and all(
        g[0] == e[0]
        and abs(g[1] - e[1]) <= 1e-12
        and abs(g[2] - e[2]) <= 1e-12
        and g[3] == e[3]
        for g, e in zip(got, expected)
    )
    return _record(
        "catalog_exactness", 3, passed, families=[f.to_json_dict() for f in families]
    )


def classification_check(
    n: int, conjugators: int = 10, seed: int = 0
) -> List[VerificationRecord]:
    """
    Hessian-based nature of every non-degenerate family against the nature
    assigned by the catalog, and a saddle probe for degenerate ones
    """
    families = enumerate_families(n)
    global_max = max(f.value for f in families)
    global_min = min(f.value for f in families)
    identity_target = TargetGate.identity(n)
    basis = sun_basis(n)
    generator = make_generator(seed + n)
    records = []
    mismatches = []
    for family in families:
        if family.is_continuum:
            records.append(
                continuum_curve_check(n, _random_conjugator(n, generator), 9)
            )
            continue
        if family.degenerate:
            point = materialize(family, _random_conjugator(n, generator)).s
            min_delta, max_delta = saddle_probe(
                identity_target, point, PROBE_RADIUS, PROBE_SAMPLES, seed + n
            )
            verdict = probe_verdict(min_delta, max_delta, n)
            records.append(
                _record(
                    "degenerate_saddle_probe",
                    n,
                    verdict == ProbeVerdict.Saddle,
                    family=family.label,
                    min_delta=min_delta,
                    max_delta=max_delta,
                    verdict=verdict.name,
                    evidence_only=True,
                )
            )
            continue
        for _ in range(conjugators):
            point = materialize(family, _random_conjugator(n, generator)).s
            spectrum = hessian_matrix(identity_target, point, basis)
            nature = classify(identity_target, point, spectrum, global_max, global_min)
            if nature != family.nature:
                mismatches.append(
                    "%s: %s vs %s" % (family.label, nature.name, family.nature.name)
                )
                break
    records.append(
        _record("classification", n, not mismatches, mismatches=mismatches)
    )
    return records


def gradient_suite(n: int, samples: int = 100, seed: int = 0) -> List[VerificationRecord]:
    generator = make_generator(seed + n)
    max_gradient_error = 0.0
    max_engine_error = 0.0
    max_identity_error = 0.0
    max_constraint_hessian = 0.0
    max_differential_error = 0.0
    for _ in range(samples):
        a = TargetGate(random_special_unitary(n, generator=generator).matrix)
        s = random_special_unitary(n, generator=generator)
        direction = random_direction(n, generator, norm=1.0)
        max_gradient_error = max(max_gradient_error, fd_gradient_check(a, s, direction))

        grad = sun_fidelity_gradient(a, s)
        ambient = ambient_gradient(a, s)
        max_engine_error = max(
            max_engine_error,
            frobenius_norm(sun_gradient(s, ambient) - grad),
            frobenius_norm(sun_gradient_by_engine(s, ambient) - grad),
        )
        max_identity_error = max(
            max_identity_error,
            abs(least_squares_cost(a, s) - (2 * n - 2 * fidelity(a, s))),
        )

        free_direction = random_direction(n, generator, traceless=False, norm=1.0)
        max_constraint_hessian = max(
            max_constraint_hessian, abs(hess_f_hw_quadratic(s, free_direction))
        )
        h = 1e-5
        fd = (
            f_hw(UnitaryPoint(unitary_geodesic(s, free_direction, h)))
            - f_hw(UnitaryPoint(unitary_geodesic(s, free_direction, -h)))
        ) / (2 * h)
        max_differential_error = max(
            max_differential_error,
            abs(fd - f_hw_differential(s, free_direction)),
        )
    s = random_special_unitary(n, generator=generator)
    gradient_square = ambient_metric(grad_f_hw(s), grad_f_hw(s))
    return [
        _record(
            "fd_gradient",
            n,
            max_gradient_error < GRADIENT_TOL,
            max_error=max_gradient_error,
        ),
        _record(
            "engine_cross_check",
            n,
            max_engine_error <= 1e-10,
            max_error=max_engine_error,
        ),
        _record(
            "least_squares_identity",
            n,
            max_identity_error <= 1e-12 * n,
            max_error=max_identity_error,
        ),
        _record(
            "constraint_geometry",
            n,
            abs(gradient_square - n / 2) <= 1e-12
            and max_constraint_hessian <= 1e-12
            and max_differential_error <= 1e-6,
            gradient_square=gradient_square,
            max_constraint_hessian=max_constraint_hessian,
            max_differential_error=max_differential_error,
        ),
    ]


def hessian_suite(n: int, directions: int = 20, seed: int = 0) -> List[VerificationRecord]:
    generator = make_generator(seed + n)
    identity_target = TargetGate.identity(n)
    worst = []
    max_error = 0.0
    for family in enumerate_families(n):
        mus = sample_continuum(5) if family.is_continuum else [None]
        for mu in mus:
            point = materialize(family, _random_conjugator(n, generator), mu).s
            for _ in range(directions):
                direction = random_direction(n, generator, norm=1.0)
                error = fd_hessian_check(identity_target, point, direction)
                tol = (
                    HESSIAN_ABS_TOL
                    if abs(hessian_quadratic(identity_target, point, direction))
                    < NEAR_ZERO
                    else HESSIAN_TOL
                )
                max_error = max(max_error, error)
                if error > tol:
                    worst.append("%s: %s" % (family.label, error))
    return [_record("fd_hessian", n, not worst, max_error=max_error, failures=worst)]


def run_suite(name: str, n_max: int = 8, seed: int = 0) -> List[VerificationRecord]:
    if name == "all":
        records = []
        for suite in SUITES:
            records += run_suite(suite, n_max=n_max, seed=seed)
        return records
    if name not in SUITES:
        raise LandscapeError("unknown verifier suite:" + name)
    if n_max < 2:
        raise LandscapeError("n_max must be at least 2")
    get_logger().info("run verifier suite %s up to n=%s", name, n_max)
    records: List[VerificationRecord] = []
    if name == "gradient":
        for n in range(2, min(n_max, 6) + 1):
            records += gradient_suite(n, seed=seed)
    elif name == "hessian":
        for n in range(2, min(n_max, 5) + 1):
            records += hessian_suite(n, seed=seed)
    elif name == "catalog":
        if n_max >= 3:
            records.append(catalog_exactness_check())
        for n in range(2, min(n_max, 6) + 1):
            records += classification_check(n, seed=seed)
    else:
        records += trap_boundary_test(range(2, n_max + 1), seed=seed)
    return records


def report_to_json(records: List[VerificationRecord]) -> str:
    return "".join(json.dumps(record.to_json_dict()) + "\n" for record in records)
