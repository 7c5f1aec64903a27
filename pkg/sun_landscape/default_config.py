import argparse
import datetime
import os
import uuid

from cyy_naive_lib.log import get_logger

from optimizer_config import OptimizerConfig, OptimizerConfigArgs
from reproducible_env import global_reproducible_env


class DefaultConfig:
    """
    Session-wide settings shared by every subcommand
    """

    def __init__(self):
        self.seed = 0
        self.worker_num = 1
        self.log_level = None
        self.save_dir = None
        self.make_reproducible = False
        self.reproducible_env_load_path = None
        self.optimizer_config_args = OptimizerConfigArgs()

    def add_args(self, parser: argparse.ArgumentParser, optimizer_args: bool = False):
        group = parser.add_argument_group("session")
        group.add_argument("--seed", type=int, default=None)
        group.add_argument("--log_level", type=str, default=None)
        group.add_argument("--save_dir", type=str, default=None)
        group.add_argument("--make_reproducible", action="store_true", default=False)
        group.add_argument("--reproducible_env_load_path", type=str, default=None)
        if optimizer_args:
            group.add_argument("--worker_num", type=int, default=None)
            self.optimizer_config_args.add_args(parser)

    def load_args(self, args: argparse.Namespace):
        for key, value in vars(args).items():
            if value is not None and key in self.__dict__:
                setattr(self, key, value)
        self.optimizer_config_args.load_args(args)

    def get_save_dir(self) -> str:
        if self.save_dir is None:
            self.save_dir = os.path.join(
                "session",
                datetime.datetime.now().strftime("%Y-%m-%d_%H:%M:%S"),
                str(uuid.uuid4()),
            )
        os.makedirs(self.save_dir, exist_ok=True)
        return self.save_dir

    def create_optimizer_config(self) -> OptimizerConfig:
        config = self.optimizer_config_args.create_config()
        get_logger().debug("optimizer config is %s", config)
        return config

    def apply_global_config(self):
        if self.log_level is not None:
            get_logger().setLevel(self.log_level)
        env = global_reproducible_env
        if env.enabled:
            return
        if self.reproducible_env_load_path is not None:
            env.load(self.reproducible_env_load_path)
            self.make_reproducible = True
        else:
            env.set_seed(self.seed)
        if self.make_reproducible:
            env.enable()

    def save_reproducible_env(self):
        if self.make_reproducible:
            global_reproducible_env.save(self.get_save_dir())
