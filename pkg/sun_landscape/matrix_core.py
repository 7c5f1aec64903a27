import torch

from landscape_type import (DimensionMismatchError, LandscapeError,
                            NotHermitianError, NotSkewHermitianError)

DTYPE = torch.complex128
REAL_DTYPE = torch.float64


def as_complex_matrix(data) -> torch.Tensor:
    """
    Convert data to a square complex128 matrix with finite entries
    """
    if isinstance(data, torch.Tensor):
        matrix = data.detach().to(dtype=DTYPE)
    else:
        matrix = torch.tensor(data, dtype=DTYPE)
    if matrix.dim() != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError("not a square matrix:" + str(tuple(matrix.shape)))
    if matrix.shape[0] == 0:
        raise DimensionMismatchError("empty matrix")
    if not torch.isfinite(torch.view_as_real(matrix)).all():
        raise LandscapeError("matrix has non-finite entries")
    return matrix


def identity(n: int) -> torch.Tensor:
    return torch.eye(n, dtype=DTYPE)


def check_same_dimension(*matrices: torch.Tensor) -> int:
    n = matrices[0].shape[-1]
    for matrix in matrices[1:]:
        if matrix.shape[-1] != n or matrix.shape[-2] != n:
            raise DimensionMismatchError(
                "dimension mismatch: %s vs %s" % (n, tuple(matrix.shape))
            )
    return n


def multiply(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    check_same_dimension(a, b)
    return a @ b


def adjoint(a: torch.Tensor) -> torch.Tensor:
    return a.transpose(-2, -1).conj().resolve_conj()


def trace(a: torch.Tensor) -> complex:
    return complex(torch.diagonal(a, dim1=-2, dim2=-1).sum(-1).item())


def frobenius_norm(a: torch.Tensor) -> float:
    return torch.linalg.matrix_norm(a, ord="fro").item()


def hermitian_residual(h: torch.Tensor) -> float:
    return frobenius_norm(h - adjoint(h))


def skew_hermitian_residual(omega: torch.Tensor) -> float:
    return frobenius_norm(omega + adjoint(omega))


def determinant(a: torch.Tensor) -> complex:
    """
    Determinant from an LU factorization with partial pivoting, a singular
    matrix yields 0
    """
    lu, pivots, _ = torch.linalg.lu_factor_ex(a)
    n = a.shape[-1]
    swaps = int((pivots != torch.arange(1, n + 1, dtype=pivots.dtype)).sum().item())
    det = torch.diagonal(lu).prod().item()
    if swaps % 2 == 1:
        det = -det
    return complex(det)


def hermitian_eig(h: torch.Tensor) -> tuple:
    """
    Return the real eigenvalues in descending order and the unitary matrix
    whose columns are the corresponding eigenvectors
    """
    residual = hermitian_residual(h)
    if residual > 1e-10 * max(1.0, frobenius_norm(h)):
        raise NotHermitianError("matrix is not Hermitian, residual " + str(residual))
    eigenvalues, eigenvectors = torch.linalg.eigh((h + adjoint(h)) / 2)
    return eigenvalues.flip(-1), eigenvectors.flip(-1)


def _skew_spectrum(omega: torch.Tensor) -> tuple:
    residual = skew_hermitian_residual(omega)
    if residual > 1e-10 * max(1.0, frobenius_norm(omega)):
        raise NotSkewHermitianError(
            "matrix is not skew-Hermitian, residual " + str(residual)
        )
    return hermitian_eig(-1j * omega)


def expm_skew(omega: torch.Tensor) -> torch.Tensor:
    """
    exp(omega) = Q diag(exp(i lambda_k)) Q^dagger where -i omega = Q diag(lambda) Q^dagger
    """
    eigenvalues, q = _skew_spectrum(omega)
    phases = torch.polar(torch.ones_like(eigenvalues), eigenvalues)
    return (q * phases) @ adjoint(q)


def expm_skew_minus_identity(omega: torch.Tensor) -> torch.Tensor:
    """
    exp(omega) - I without cancellation for small omega
    """
    eigenvalues, q = _skew_spectrum(omega)
    half = eigenvalues / 2
    factors = 2j * torch.sin(half).to(DTYPE) * torch.polar(torch.ones_like(half), half)
    return (q * factors) @ adjoint(q)


def polar_unitary(a: torch.Tensor) -> torch.Tensor:
    """
    Unitary factor a (a^dagger a)^(-1/2) of the polar decomposition
    """
    eigenvalues, v = hermitian_eig(adjoint(a) @ a)
    assert (eigenvalues > 0).all()
    inv_sqrt = eigenvalues.rsqrt().to(DTYPE)
    return a @ ((v * inv_sqrt) @ adjoint(v))
