from cyy_naive_lib.log import get_logger
from fidelity_landscape import TargetGate
from optimizer import _run_start
from optimizer_config import OptimizerConfig
from sun_geometry import random_special_unitary

from data_structure.torch_process_pool import TorchProcessPool


def optimize(worker_id):
    get_logger().info("worker_id is %s", worker_id)
    config = OptimizerConfig(max_iters=20)
    start = random_special_unitary(3, seed=worker_id)
    trace = _run_start(TargetGate.identity(3).matrix, start.matrix, config, None)
    return worker_id, trace.final_value


def test_process_pool():
    pool = TorchProcessPool(max_workers=2)
    futures = [pool.exec(optimize, worker_id) for worker_id in range(3)]
    results = [future.result() for future in futures]
    pool.stop()
    assert [worker_id for worker_id, _ in results] == [0, 1, 2]
    for _, value in results:
        assert -3 <= value <= 3
