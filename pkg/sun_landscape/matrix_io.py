import json
import math

import torch
from cyy_naive_lib.log import get_logger

from landscape_type import LandscapeError, MatrixFileError
from matrix_core import DTYPE, REAL_DTYPE, as_complex_matrix, determinant
from sun_geometry import ADMISSION_TOL, unitarity_residual


def matrix_to_json_dict(matrix: torch.Tensor) -> dict:
    matrix = as_complex_matrix(matrix)
    return {
        "n": matrix.shape[0],
        "re": matrix.real.tolist(),
        "im": matrix.imag.tolist(),
    }


def matrix_from_json_dict(obj) -> torch.Tensor:
    if not isinstance(obj, dict):
        raise MatrixFileError("matrix file must hold a JSON object")
    for key in ("n", "re", "im"):
        if key not in obj:
            raise MatrixFileError("matrix file lacks field " + key)
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixFileError("invalid n:" + str(n))
    parts = []
    for key in ("re", "im"):
        rows = obj[key]
        if not isinstance(rows, list) or len(rows) != n:
            raise MatrixFileError("field %s must have %s rows" % (key, n))
        for row in rows:
            if not isinstance(row, list) or len(row) != n:
                raise MatrixFileError("field %s must have %s columns" % (key, n))
            for entry in row:
                if isinstance(entry, bool) or not isinstance(entry, (int, float)):
                    raise MatrixFileError("non-numeric entry %r in %s" % (entry, key))
                if not math.isfinite(entry):
                    raise MatrixFileError("non-finite entry in " + key)
        parts.append(torch.tensor(rows, dtype=REAL_DTYPE))
    return torch.complex(parts[0], parts[1]).to(DTYPE)


def check_admission(matrix: torch.Tensor, su_mode: bool) -> None:
    residual = unitarity_residual(matrix)
    if residual > ADMISSION_TOL:
        raise MatrixFileError("matrix is not unitary, residual " + str(residual))
    if su_mode:
        det_residual = abs(determinant(matrix) - 1)
        if det_residual > ADMISSION_TOL:
            raise MatrixFileError(
                "matrix is not in SU(N), |det - 1| = " + str(det_residual)
            )


def read_matrix(path: str, su_mode: bool = False, n: int = None) -> torch.Tensor:
    get_logger().debug("read matrix from %s", path)
    try:
        with open(path, "rt") as f:
            obj = json.load(f)
    except (OSError, ValueError) as e:
        raise MatrixFileError("can't read matrix file %s: %s" % (path, e)) from e
    matrix = matrix_from_json_dict(obj)
    if n is not None and matrix.shape[0] != n:
        raise MatrixFileError("expect a %sx%s matrix, got n=%s" % (n, n, matrix.shape[0]))
    try:
        check_admission(matrix, su_mode)
    except MatrixFileError as e:
        raise MatrixFileError("%s: %s" % (path, e)) from e
    return matrix


def write_matrix(path: str, matrix: torch.Tensor) -> None:
    try:
        obj = matrix_to_json_dict(matrix)
    except LandscapeError as e:
        raise MatrixFileError(str(e)) from e
    with open(path, "wt") as f:
        json.dump(obj, f)
