import json
import os
import threading
import zlib
from typing import Dict, Optional

import torch
from cyy_naive_lib.log import get_logger


class ReproducibleEnv:
    """
    One seed for a session. Every stochastic path draws from its own named
    torch.Generator whose seed derives from the session seed and the stream
    name, so adding a stream leaves the others untouched.
    """

    lock = threading.RLock()

    def __init__(self):
        self.seed: Optional[int] = None
        self.enabled = False
        self.__streams: Dict[str, int] = dict()

    @property
    def streams(self) -> Dict[str, int]:
        return dict(self.__streams)

    def set_seed(self, seed: int):
        with ReproducibleEnv.lock:
            assert not self.enabled
            self.seed = seed

    def enable(self):
        with ReproducibleEnv.lock:
            if self.seed is None:
                self.seed = torch.initial_seed() % (2 ** 63)
                get_logger().warning("no seed given, use torch seed %s", self.seed)
            torch.use_deterministic_algorithms(True)
            torch.manual_seed(self.seed)
            get_logger().warning("reproducible env enabled with seed %s", self.seed)
            self.enabled = True

    def disable(self):
        with ReproducibleEnv.lock:
            torch.use_deterministic_algorithms(False)
            self.enabled = False

    def __enter__(self):
        self.enable()
        return self

    def __exit__(self, exc_type, exc_value, real_traceback):
        if real_traceback:
            return
        self.disable()

    def stream_seed(self, stream: str) -> int:
        assert self.seed is not None
        return (self.seed + zlib.crc32(stream.encode())) % (2 ** 63)

    def get_generator(self, stream: str) -> torch.Generator:
        with ReproducibleEnv.lock:
            seed = self.stream_seed(stream)
            self.__streams[stream] = seed
            generator = torch.Generator()
            generator.manual_seed(seed)
            return generator

    def save(self, save_dir: str) -> str:
        with ReproducibleEnv.lock:
            assert self.seed is not None
            os.makedirs(save_dir, exist_ok=True)
            env_path = os.path.join(save_dir, "reproducible_env.json")
            with open(env_path, "wt") as f:
                json.dump({"seed": self.seed, "streams": self.__streams}, f)
            get_logger().info("save reproducible env to %s", env_path)
            return env_path

    def load(self, path: str):
        with ReproducibleEnv.lock:
            assert not self.enabled
            with open(path, "rt") as f:
                obj: dict = json.load(f)
            get_logger().info("load reproducible env from %s", path)
            self.seed = obj["seed"]
            for stream, seed in obj.get("streams", {}).items():
                assert seed == self.stream_seed(stream), stream


global_reproducible_env: ReproducibleEnv = ReproducibleEnv()
