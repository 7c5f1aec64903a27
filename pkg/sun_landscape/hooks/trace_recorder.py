import json
import os

from cyy_naive_lib.log import get_logger
from hook import Hook


class TraceRecorder(Hook):
    """
    Append one JSON object per iterate to a file
    """

    def __init__(self, path: str):
        super().__init__()
        self.__path = path
        self.__file = None

    @property
    def path(self) -> str:
        return self.__path

    def _before_run(self, **kwargs):
        directory = os.path.dirname(self.__path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        get_logger().debug("record trace to %s", self.__path)
        self.__file = open(self.__path, "wt")

    def _after_iteration(self, **kwargs):
        record = kwargs["record"]
        self.__file.write(
            json.dumps(
                {
                    "iter": record.iteration,
                    "value": record.value,
                    "grad_norm": record.grad_norm,
                    "step": record.step,
                }
            )
            + "\n"
        )

    def _after_run(self, **kwargs):
        if self.__file is not None:
            self.__file.close()
            self.__file = None
