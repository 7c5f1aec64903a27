import dataclasses
import os
from typing import Callable, Dict, List, Optional, Set

import torch
from cyy_naive_lib.log import get_logger

from critical_catalog import CriticalFamily, enumerate_families, match
from data_structure.torch_process_pool import TorchProcessPool
from fidelity_landscape import (TargetGate, criticality_residual, fidelity,
                                fidelity_gradient_direction,
                                fidelity_increment, reduce_point)
from hook import Hook
from hooks.optimizer_debugger import OptimizerDebugger
from hooks.trace_logger import TraceLogger
from hooks.trace_recorder import TraceRecorder
from landscape_type import (AmbiguousMatchError, LandscapeError,
                            LineSearchError, NotCriticalError,
                            OptimizerHookPoint, StopExecutingException)
from matrix_core import determinant, expm_skew
from optimizer_config import OptimizerConfig
from sun_geometry import (SpecialUnitaryPoint, check_n, metric_norm,
                          project_to_special_unitary, random_special_unitary,
                          unitarity_residual)


@dataclasses.dataclass(frozen=True)
class IterationRecord:
    """
    f(S_k) and |grad f(S_k)| with the step tau_k taken from S_k, 0 at the
    last iterate
    """

    iteration: int
    value: float
    grad_norm: float
    step: float


class OptimizeTrace:
    def __init__(self, n: int):
        self.__n = n
        self.iterates: List[IterationRecord] = []
        self.final_point: Optional[SpecialUnitaryPoint] = None
        self.converged = False
        self.matched_family: Optional[CriticalFamily] = None
        self.reorthonormalizations = 0

    @property
    def n(self) -> int:
        return self.__n

    @property
    def iterations(self) -> int:
        return sum(1 for record in self.iterates if record.step > 0)

    @property
    def final_value(self) -> float:
        return self.iterates[-1].value

    def is_monotone(self, sign: float = 1.0, tol: float = 1e-12) -> bool:
        return all(
            sign * (b.value - a.value) >= -tol
            for a, b in zip(self.iterates, self.iterates[1:])
        )


class _OptimizerBase:
    def __init__(self):
        # insertion order is execution order
        self.__hooks: Dict[OptimizerHookPoint, Dict[str, Callable]] = {
            hook_point: {} for hook_point in OptimizerHookPoint
        }
        self.__stripable_hooks: Set[str] = set()
        self.__disabled_hooks: Set[str] = set()

    def exec_hooks(self, hook_point: OptimizerHookPoint, **kwargs):
        for name, fun in self.__hooks[hook_point].items():
            if name not in self.__disabled_hooks:
                fun(**kwargs)

    def append_named_hook(
        self, hook_point: OptimizerHookPoint, name: str, fun: Callable, stripable=False
    ):
        if name in self.__hooks[hook_point]:
            raise RuntimeError(name + " has registered")
        self.__hooks[hook_point][name] = fun
        if stripable:
            self.__stripable_hooks.add(name)

    def append_hook(self, hook: Hook):
        for hook_point, name, fun in hook.yield_hooks():
            self.append_named_hook(hook_point, name, fun, hook.stripable)

    def disable_stripable_hooks(self):
        self.__disabled_hooks.update(self.__stripable_hooks)

    def enable_hook(self, hook: Hook):
        self.__disabled_hooks.difference_update(hook.yield_hook_names())

    def disable_hook(self, hook: Hook):
        self.__disabled_hooks.update(hook.yield_hook_names())


class GeodesicOptimizer(_OptimizerBase):
    """
    Armijo backtracking along the geodesics exp(t Omega) S of SU(N), where
    Omega S is the embedded gradient of Re tr(A^dagger S)
    """

    def __init__(
        self,
        target: TargetGate,
        config: OptimizerConfig,
        trace_path: Optional[str] = None,
    ):
        super().__init__()
        if not target.su_mode:
            raise LandscapeError("the optimizer needs a target in SU(N)")
        self.__target = target
        self.__config = config
        self.append_hook(TraceLogger(config.log_interval))
        if trace_path is not None:
            self.append_hook(TraceRecorder(trace_path))
        self.__debugger = None
        self.__catalog: Optional[List[CriticalFamily]] = None

    @property
    def target(self) -> TargetGate:
        return self.__target

    @property
    def config(self) -> OptimizerConfig:
        return self.__config

    @property
    def catalog(self) -> List[CriticalFamily]:
        if self.__catalog is None:
            self.__catalog = enumerate_families(self.__target.n)
        return self.__catalog

    def __prepare(self):
        if self.__config.debugging_mode:
            get_logger().warning("optimize in debugging mode")
            if self.__debugger is None:
                self.__debugger = OptimizerDebugger()
                self.append_hook(self.__debugger)
            else:
                self.enable_hook(self.__debugger)
        elif self.__debugger is not None:
            self.disable_hook(self.__debugger)

    def __append_record(self, trace: OptimizeTrace, record: IterationRecord, **kwargs):
        trace.iterates.append(record)
        self.exec_hooks(
            OptimizerHookPoint.AFTER_ITERATION, optimizer=self, record=record, **kwargs
        )

    def __next_point(self, trace: OptimizeTrace, matrix) -> SpecialUnitaryPoint:
        drift = max(unitarity_residual(matrix), abs(determinant(matrix) - 1))
        if drift > self.__config.drift_tol:
            get_logger().debug("re-orthonormalize iterate with drift %s", drift)
            matrix = project_to_special_unitary(matrix)
            trace.reorthonormalizations += 1
        return SpecialUnitaryPoint(matrix)

    def __line_search(self, trace, point, search, grad_norm, iteration, step) -> tuple:
        config = self.__config
        slope = grad_norm**2
        bound = config.armijo_c1 * slope
        while True:
            delta = fidelity_increment(self.__target, point, search, step)
            gain = config.sign * delta
            if gain >= bound * step:
                break
            step *= config.shrink
            if step < config.min_step:
                raise LineSearchError(
                    "step underflow at iteration %s, gradient norm %s"
                    % (iteration, grad_norm),
                    trace,
                )
        # maximizer of the quadratic through gain(0), gain'(0) and gain(step)
        curvature = slope * step - gain
        if curvature <= 0:
            return step, delta
        refined_step = slope * step**2 / (2 * curvature)
        if refined_step >= step:
            return step, delta
        refined_delta = fidelity_increment(self.__target, point, search, refined_step)
        refined_gain = config.sign * refined_delta
        if refined_gain >= bound * refined_step and refined_gain > gain:
            return refined_step, refined_delta
        return step, delta

    def run(self, start: SpecialUnitaryPoint) -> OptimizeTrace:
        check_n(self.__target, start)
        self.__prepare()
        config = self.__config
        trace = OptimizeTrace(start.n)
        point = start
        value = fidelity(self.__target, point)
        self.exec_hooks(
            OptimizerHookPoint.BEFORE_RUN, optimizer=self, point=point, value=value
        )
        failure: Optional[LineSearchError] = None
        trial_step = config.init_step
        try:
            for iteration in range(config.max_iters + 1):
                direction = fidelity_gradient_direction(self.__target, point)
                grad_norm = metric_norm(direction)
                if grad_norm <= config.grad_tol or iteration == config.max_iters:
                    trace.converged = grad_norm <= config.grad_tol
                    self.__append_record(
                        trace,
                        IterationRecord(iteration, value, grad_norm, 0.0),
                        point=point,
                        delta=0.0,
                    )
                    break
                self.exec_hooks(
                    OptimizerHookPoint.BEFORE_ITERATION,
                    optimizer=self,
                    iteration=iteration,
                    point=point,
                )
                search = direction.scale(config.sign)
                step, delta = self.__line_search(
                    trace, point, search, grad_norm, iteration, trial_step
                )
                trial_step = min(config.init_step, step / config.shrink)
                point = self.__next_point(
                    trace, expm_skew(step * search.omega) @ point.matrix
                )
                record = IterationRecord(iteration, value, grad_norm, step)
                value = fidelity(self.__target, point)
                self.__append_record(trace, record, point=point, delta=delta)
        except StopExecutingException:
            get_logger().warning("stop optimizing")
        except LineSearchError as e:
            get_logger().error("line search failed: %s", e)
            failure = e
        if not trace.iterates or trace.iterates[-1].step > 0:
            trace.iterates.append(
                IterationRecord(
                    trace.iterations,
                    value,
                    metric_norm(fidelity_gradient_direction(self.__target, point)),
                    0.0,
                )
            )
        trace.final_point = point
        if trace.converged:
            self.__certify(trace)
        self.exec_hooks(OptimizerHookPoint.AFTER_RUN, optimizer=self, trace=trace)
        if failure is not None:
            raise failure
        return trace

    def __certify(self, trace: OptimizeTrace):
        _, residual = criticality_residual(self.__target, trace.final_point)
        assert residual <= 10 * self.__config.grad_tol, residual
        try:
            trace.matched_family = match(
                reduce_point(self.__target, trace.final_point),
                self.catalog,
                self.__config.match_tol,
            )
        except (AmbiguousMatchError, NotCriticalError) as e:
            get_logger().warning("final point matches no family: %s", e)
        if trace.matched_family is None:
            get_logger().warning("final point matches no catalog family")


def run(
    a: TargetGate,
    start: SpecialUnitaryPoint,
    config: OptimizerConfig,
    trace_path: Optional[str] = None,
) -> OptimizeTrace:
    return GeodesicOptimizer(a, config, trace_path=trace_path).run(start)


def random_starts(
    n: int, count: int, generator: torch.Generator
) -> List[SpecialUnitaryPoint]:
    return [random_special_unitary(n, generator=generator) for _ in range(count)]


def _trace_path_of(trace_path: Optional[str], index: int, count: int) -> Optional[str]:
    if trace_path is None or count == 1:
        return trace_path
    root, ext = os.path.splitext(trace_path)
    return "%s_%s%s" % (root, index, ext)


def _run_start(target_matrix, start_matrix, config, trace_path, quiet=True):
    target = TargetGate(target_matrix)
    optimizer = GeodesicOptimizer(target, config, trace_path=trace_path)
    if quiet:
        optimizer.disable_stripable_hooks()
    try:
        return optimizer.run(SpecialUnitaryPoint(start_matrix))
    except LineSearchError as e:
        get_logger().warning("keep the unconverged trace: %s", e)
        return e.trace


def run_starts(
    a: TargetGate,
    starts: List[SpecialUnitaryPoint],
    config: OptimizerConfig,
    worker_num: int = 1,
    trace_path: Optional[str] = None,
) -> List[OptimizeTrace]:
    """
    Independent runs from each start, ordered by start index
    """
    count = len(starts)
    if worker_num <= 1 or count <= 1:
        return [
            _run_start(
                a.matrix,
                start.matrix,
                config,
                _trace_path_of(trace_path, i, count),
                quiet=count > 1,
            )
            for i, start in enumerate(starts)
        ]
    get_logger().info("run %s starts on %s workers", count, worker_num)
    pool = TorchProcessPool(max_workers=worker_num)
    try:
        futures = [
            pool.exec(
                _run_start,
                a.matrix,
                start.matrix,
                config,
                _trace_path_of(trace_path, i, count),
            )
            for i, start in enumerate(starts)
        ]
        return [future.result() for future in futures]
    finally:
        pool.stop()


def basin_statistics(traces: List[OptimizeTrace]) -> Dict[str, int]:
    """
    How many runs end in each catalog family, keyed by family label
    """
    statistics: Dict[str, int] = dict()
    for trace in traces:
        if not trace.converged:
            key = "not_converged"
        elif trace.matched_family is None:
            key = "unmatched"
        else:
            key = trace.matched_family.label
        statistics[key] = statistics.get(key, 0) + 1
    get_logger().info("basin statistics %s", statistics)
    return statistics
