from cyy_naive_lib.log import get_logger
from hook import Hook


class TraceLogger(Hook):
    def __init__(self, interval: int = 100):
        super().__init__(stripable=True)
        self.__interval = interval

    def _before_run(self, **kwargs):
        optimizer = kwargs["optimizer"]
        get_logger().info("target dimension is %s", optimizer.target.n)
        get_logger().info("optimizer config is %s", optimizer.config)
        get_logger().debug("start value is %s", kwargs["value"])

    def _after_iteration(self, **kwargs):
        record = kwargs["record"]
        if self.__interval > 0 and record.iteration % self.__interval == 0:
            get_logger().debug(
                "iteration: %s, value: %s, gradient norm: %s, step: %s",
                record.iteration,
                record.value,
                record.grad_norm,
                record.step,
            )

    def _after_run(self, **kwargs):
        trace = kwargs["trace"]
        if trace.converged:
            get_logger().info(
                "converged after %s iterations to value %s, family %s",
                trace.iterations,
                trace.final_value,
                trace.matched_family.label
                if trace.matched_family is not None
                else None,
            )
        else:
            get_logger().warning(
                "stopped after %s iterations without convergence, value %s gradient norm %s",
                trace.iterations,
                trace.final_value,
                trace.iterates[-1].grad_norm,
            )
