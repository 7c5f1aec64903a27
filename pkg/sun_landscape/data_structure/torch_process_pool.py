#!/usr/bin/env python3

import concurrent.futures

import torch
from cyy_naive_lib.data_structure.executor_pool import ExecutorPool


class TorchProcessPool(ExecutorPool):
    """
    Spawned worker processes for independent optimizer runs
    """

    def __init__(self, max_workers: int = None):
        super().__init__(
            concurrent.futures.ProcessPoolExecutor(
                max_workers=max_workers,
                mp_context=torch.multiprocessing.get_context("spawn"),
            ),
        )
