from hook import Hook
from sun_geometry import ADMISSION_TOL, unitarity_residual


class OptimizerDebugger(Hook):
    def _after_iteration(self, **kwargs):
        point = kwargs["point"]
        residual = unitarity_residual(point.matrix)
        if residual > ADMISSION_TOL:
            raise RuntimeError("iterate left U(N), residual " + str(residual))
        if abs(point.det - 1) > ADMISSION_TOL:
            raise RuntimeError("iterate left SU(N), det " + str(point.det))
        record = kwargs["record"]
        if record.step == 0:
            return
        optimizer = kwargs["optimizer"]
        gain = optimizer.config.sign * kwargs["delta"]
        bound = optimizer.config.armijo_c1 * record.step * record.grad_norm**2
        if gain < bound:
            raise RuntimeError(
                "accepted step violates sufficient increase: %s < %s" % (gain, bound)
            )
