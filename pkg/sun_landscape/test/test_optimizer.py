import json
import math
import os

import pytest
from critical_catalog import enumerate_families, materialize
from fidelity_landscape import (TargetGate, criticality_residual, fidelity,
                                fidelity_gradient_direction, reduce_point)
from landscape_type import (CriticalNature, LandscapeError, LineSearchError,
                            OptimizeMode, OptimizerHookPoint,
                            StopExecutingException)
from matrix_core import expm_skew, identity
from matrix_core import trace as matrix_trace
from optimizer import (GeodesicOptimizer, basin_statistics, random_starts,
                       run, run_starts)
from optimizer_config import OptimizerConfig
from sun_geometry import (SpecialUnitaryPoint, UnitaryPoint, geodesic_step,
                          make_generator, metric_norm, random_direction,
                          random_special_unitary, unitarity_residual)


def test_start_at_global_max():
    for n in range(2, 5):
        trace = run(
            TargetGate.identity(n), SpecialUnitaryPoint(identity(n)), OptimizerConfig()
        )
        assert trace.converged
        assert trace.iterations == 0
        assert len(trace.iterates) == 1
        assert trace.matched_family.kplus == n
        assert trace.matched_family.mu == 0
        assert trace.matched_family.nature == CriticalNature.GlobalMax


def test_random_starts_n3():
    config = OptimizerConfig()
    target = TargetGate.identity(3)
    catalog = enumerate_families(3)
    traces = run_starts(target, random_starts(3, 50, make_generator(0)), config)
    assert len(traces) == 50
    for trace in traces:
        assert trace.converged
        assert trace.iterates[-1].grad_norm <= 1e-9
        assert trace.matched_family in catalog
        assert trace.is_monotone()
        _, residual = criticality_residual(target, trace.final_point)
        assert residual <= 1e-8
        for record in trace.iterates:
            assert record.value <= 3 + 1e-12
    generic = [t for t in traces if t.matched_family.nature == CriticalNature.GlobalMax]
    assert len(generic) >= 45
    for trace in generic:
        assert abs(trace.final_value - 3) < 1e-12
    statistics = basin_statistics(traces)
    assert sum(statistics.values()) == 50


def test_trap_at_n5():
    n = 5
    omega = complex(math.cos(2 * math.pi / 5), -math.sin(2 * math.pi / 5))
    trap = SpecialUnitaryPoint(omega * identity(n))
    start = geodesic_step(trap, random_direction(n, make_generator(1), norm=0.05), 1.0)
    trace = run(TargetGate.identity(n), start, OptimizerConfig())
    assert trace.converged
    assert abs(trace.final_value - 5 * math.cos(math.radians(72))) < 1e-9
    assert trace.matched_family.nature == CriticalNature.LocalMaxNotGlobal


def test_trap_at_n5_seeds():
    n = 5
    omega = complex(math.cos(2 * math.pi / 5), -math.sin(2 * math.pi / 5))
    trap = SpecialUnitaryPoint(omega * identity(n))
    target = TargetGate.identity(n)
    for seed in range(1, 11):
        start = geodesic_step(
            trap, random_direction(n, make_generator(seed), norm=0.05), 1.0
        )
        direction = fidelity_gradient_direction(target, start)
        assert abs(matrix_trace(direction.omega)) < 1e-3 * metric_norm(direction) ** 2
        result = run(target, start, OptimizerConfig())
        assert result.converged
        assert abs(result.final_value - 5 * math.cos(math.radians(72))) < 1e-9
        assert result.matched_family.nature == CriticalNature.LocalMaxNotGlobal


def test_minimize():
    target = TargetGate(random_special_unitary(2, seed=2).matrix)
    config = OptimizerConfig(mode=OptimizeMode.Minimize)
    start = random_special_unitary(2, seed=3)
    trace = run(target, start, config)
    assert trace.converged
    assert trace.is_monotone(sign=-1)
    assert abs(trace.final_value + 2) < 1e-9
    assert trace.matched_family.nature == CriticalNature.GlobalMin
    reduced = reduce_point(target, trace.final_point)
    assert abs(fidelity(TargetGate.identity(2), reduced) - trace.final_value) < 1e-12


def test_feasibility():
    config = OptimizerConfig(max_iters=30)
    config.debugging_mode = True
    target = TargetGate(random_special_unitary(4, seed=4).matrix)
    optimizer = GeodesicOptimizer(target, config)
    points = []
    optimizer.append_named_hook(
        OptimizerHookPoint.AFTER_ITERATION,
        "collect_points",
        lambda **kwargs: points.append(kwargs["point"]),
    )
    trace = optimizer.run(random_special_unitary(4, seed=5))
    assert len(points) == len(trace.iterates)
    for point in points:
        assert unitarity_residual(point.matrix) <= 1e-8
        assert abs(point.det - 1) <= 1e-8


def test_non_convergence():
    config = OptimizerConfig(max_iters=2, grad_tol=1e-15)
    trace = run(TargetGate.identity(4), random_special_unitary(4, seed=6), config)
    assert not trace.converged
    assert trace.matched_family is None
    assert trace.iterations == 2
    assert len(trace.iterates) == 3


def test_stop_by_hook():
    def stop(**kwargs):
        raise StopExecutingException()

    optimizer = GeodesicOptimizer(TargetGate.identity(3), OptimizerConfig())
    optimizer.append_named_hook(OptimizerHookPoint.BEFORE_ITERATION, "stop", stop)
    trace = optimizer.run(random_special_unitary(3, seed=7))
    assert not trace.converged
    assert len(trace.iterates) == 1
    assert trace.iterates[0].step == 0
    assert trace.final_point is not None


def test_target_must_be_special_unitary():
    phase_target = TargetGate(expm_skew(0.3j * identity(3)))
    with pytest.raises(LandscapeError):
        GeodesicOptimizer(phase_target, OptimizerConfig())


def test_trace_file(tmp_path):
    path = os.path.join(str(tmp_path), "trace.jsonl")
    trace = run(
        TargetGate.identity(3),
        random_special_unitary(3, seed=8),
        OptimizerConfig(),
        trace_path=path,
    )
    with open(path, "rt") as f:
        lines = [json.loads(line) for line in f]
    assert len(lines) == len(trace.iterates)
    assert list(lines[0].keys()) == ["iter", "value", "grad_norm", "step"]
    assert lines[-1]["step"] == 0


def test_saddle_start_stops():
    family = next(f for f in enumerate_families(3) if f.kplus == 1)
    point = materialize(family, UnitaryPoint(identity(3))).s
    trace = run(TargetGate.identity(3), point, OptimizerConfig())
    assert trace.converged
    assert trace.iterations == 0
    assert trace.matched_family == family


def near_identity(n, seed):
    direction = random_direction(n, make_generator(seed), norm=0.1)
    return geodesic_step(SpecialUnitaryPoint(identity(n)), direction, 1.0)


def failing_line_search_config():
    # only the full step is admissible, and it overshoots near the maximum
    config = OptimizerConfig(armijo_c1=0.5)
    config.min_step = 0.9
    return config


def test_iteration_bound():
    trace = run(TargetGate.identity(4), near_identity(4, 10), OptimizerConfig())
    assert trace.converged
    assert trace.iterations <= 20
    target = TargetGate(random_special_unitary(3, seed=12).matrix)
    traces = run_starts(
        target, random_starts(3, 10, make_generator(11)), OptimizerConfig()
    )
    assert all(t.converged for t in traces)
    assert max(t.iterations for t in traces) < 1000


def test_line_search_failure(tmp_path):
    path = os.path.join(str(tmp_path), "trace.jsonl")
    optimizer = GeodesicOptimizer(
        TargetGate.identity(3), failing_line_search_config(), trace_path=path
    )
    finished = []
    optimizer.append_named_hook(
        OptimizerHookPoint.AFTER_RUN,
        "finished",
        lambda **kwargs: finished.append(kwargs["trace"]),
    )
    with pytest.raises(LineSearchError) as e:
        optimizer.run(near_identity(3, 9))
    trace = e.value.trace
    assert finished == [trace]
    assert not trace.converged
    assert trace.final_point is not None
    assert len(trace.iterates) == 1
    assert trace.iterates[0].step == 0
    assert os.path.isfile(path)


def test_run_starts_keeps_failed_start():
    starts = [near_identity(3, 9), near_identity(3, 13)]
    traces = run_starts(TargetGate.identity(3), starts, failing_line_search_config())
    assert len(traces) == 2
    assert not any(t.converged for t in traces)
    assert basin_statistics(traces) == {"not_converged": 2}
