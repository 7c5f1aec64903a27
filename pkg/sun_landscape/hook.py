from typing import Callable, Dict, Iterator, Tuple

from landscape_type import OptimizerHookPoint


class Hook:
    """
    A bundle of optimizer callbacks. A method named after a hook point, such
    as _after_iteration for AFTER_ITERATION, runs at that point with keyword
    arguments only.
    """

    def __init__(self, stripable: bool = False):
        self.__stripable = stripable

    @property
    def stripable(self) -> bool:
        return self.__stripable

    @staticmethod
    def method_name(hook_point: OptimizerHookPoint) -> str:
        return "_" + hook_point.name.lower()

    def callbacks(self) -> Dict[OptimizerHookPoint, Callable]:
        return {
            hook_point: getattr(self, self.method_name(hook_point))
            for hook_point in OptimizerHookPoint
            if hasattr(self, self.method_name(hook_point))
        }

    def yield_hooks(self) -> Iterator[Tuple[OptimizerHookPoint, str, Callable]]:
        for hook_point, fun in self.callbacks().items():
            name = type(self).__name__ + "." + self.method_name(hook_point)
            yield hook_point, name, fun

    def yield_hook_names(self) -> Iterator[str]:
        for _, name, __ in self.yield_hooks():
            yield name
