from cyy_naive_lib.log import get_logger

from landscape_type import OptimizeMode


class OptimizerConfig:
    def __init__(
        self,
        mode: OptimizeMode = OptimizeMode.Maximize,
        max_iters: int = 5000,
        grad_tol: float = 1e-9,
        armijo_c1: float = 1e-4,
        shrink: float = 0.5,
        init_step: float = 1.0,
    ):
        self.__mode = mode
        self.__max_iters = max_iters
        self.__grad_tol = grad_tol
        self.__armijo_c1 = armijo_c1
        self.__shrink = shrink
        self.__init_step = init_step
        self.min_step = 1e-16
        self.drift_tol = 1e-10
        self.match_tol = 1e-6
        self.log_interval = 100
        self.debugging_mode = False
        self.__check()

    def __check(self):
        if not 0 < self.__shrink < 1:
            raise RuntimeError("shrink must lie in (0, 1):" + str(self.__shrink))
        if not 0 < self.__armijo_c1 < 1:
            raise RuntimeError("armijo_c1 must lie in (0, 1):" + str(self.__armijo_c1))
        if self.__max_iters < 0:
            raise RuntimeError("max_iters must be non-negative")
        if self.__grad_tol <= 0 or self.__init_step <= 0:
            raise RuntimeError("grad_tol and init_step must be positive")

    @property
    def mode(self) -> OptimizeMode:
        return self.__mode

    def set_mode(self, mode: OptimizeMode):
        self.__mode = mode

    @property
    def sign(self) -> float:
        return 1.0 if self.__mode == OptimizeMode.Maximize else -1.0

    @property
    def max_iters(self) -> int:
        return self.__max_iters

    def set_max_iters(self, max_iters: int):
        self.__max_iters = max_iters
        self.__check()

    @property
    def grad_tol(self) -> float:
        return self.__grad_tol

    def set_grad_tol(self, grad_tol: float):
        self.__grad_tol = grad_tol
        self.__check()

    @property
    def armijo_c1(self) -> float:
        return self.__armijo_c1

    def set_armijo_c1(self, armijo_c1: float):
        self.__armijo_c1 = armijo_c1
        self.__check()

    @property
    def shrink(self) -> float:
        return self.__shrink

    def set_shrink(self, shrink: float):
        self.__shrink = shrink
        self.__check()

    @property
    def init_step(self) -> float:
        return self.__init_step

    def set_init_step(self, init_step: float):
        self.__init_step = init_step
        self.__check()

    def __str__(self):
        return (
            "mode:"
            + self.__mode.name
            + " max_iters:"
            + str(self.__max_iters)
            + " grad_tol:"
            + str(self.__grad_tol)
            + " armijo_c1:"
            + str(self.__armijo_c1)
            + " shrink:"
            + str(self.__shrink)
            + " init_step:"
            + str(self.__init_step)
        )


class OptimizerConfigArgs:
    def __init__(self):
        self.mode = None
        self.max_iters = None
        self.grad_tol = None
        self.armijo_c1 = None
        self.shrink = None
        self.init_step = None
        self.debug = False

    def add_args(self, parser):
        parser.add_argument("--mode", type=str, default="max", choices=["max", "min"])
        parser.add_argument("--max_iters", type=int, default=None)
        parser.add_argument("--grad_tol", type=float, default=None)
        parser.add_argument("--armijo_c1", type=float, default=None)
        parser.add_argument("--shrink", type=float, default=None)
        parser.add_argument("--init_step", type=float, default=None)
        parser.add_argument("--debug", action="store_true", default=False)

    def load_args(self, args):
        for attr in dir(args):
            if attr.startswith("_"):
                continue
            if not hasattr(self, attr):
                continue
            get_logger().debug("set optimizer config attr %s", attr)
            value = getattr(args, attr)
            if value is not None:
                setattr(self, attr, value)

    def create_config(self) -> OptimizerConfig:
        config = OptimizerConfig()
        if self.mode is not None:
            config.set_mode(OptimizeMode.from_str(self.mode))
        if self.max_iters is not None:
            config.set_max_iters(self.max_iters)
        if self.grad_tol is not None:
            config.set_grad_tol(self.grad_tol)
        if self.armijo_c1 is not None:
            config.set_armijo_c1(self.armijo_c1)
        if self.shrink is not None:
            config.set_shrink(self.shrink)
        if self.init_step is not None:
            config.set_init_step(self.init_step)
        if self.debug:
            get_logger().warning("debug the optimizer")
            config.debugging_mode = True
        return config
