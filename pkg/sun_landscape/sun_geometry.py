import cmath
import functools
import math
from typing import Optional

import torch

from embedded_gradient import ConstraintSystem, embedded_gradient
from landscape_type import (DimensionMismatchError, LandscapeError,
                            NotSkewHermitianError, NotSpecialUnitaryError,
                            NotUnitaryError, WestPoleError)
from matrix_core import (DTYPE, adjoint, as_complex_matrix, determinant,
                         expm_skew, frobenius_norm, identity, polar_unitary,
                         skew_hermitian_residual, trace)

ADMISSION_TOL = 1e-8
ALGEBRA_TOL = 1e-10
WEST_POLE_TOL = 1e-8


def unitarity_residual(u: torch.Tensor) -> float:
    return frobenius_norm(adjoint(u) @ u - identity(u.shape[0]))


class UnitaryPoint:
    def __init__(self, matrix, tol: float = ADMISSION_TOL):
        self._matrix = as_complex_matrix(matrix)
        residual = unitarity_residual(self._matrix)
        if residual > tol:
            raise NotUnitaryError("matrix is not unitary, residual " + str(residual))
        self._det: Optional[complex] = None

    @property
    def matrix(self) -> torch.Tensor:
        return self._matrix

    @property
    def n(self) -> int:
        return self._matrix.shape[0]

    @property
    def det(self) -> complex:
        if self._det is None:
            self._det = determinant(self._matrix)
        return self._det

    def __repr__(self):
        return "%s(n=%s)" % (self.__class__.__name__, self.n)


class SpecialUnitaryPoint(UnitaryPoint):
    def __init__(self, matrix, tol: float = ADMISSION_TOL):
        try:
            super().__init__(matrix, tol=tol)
        except NotUnitaryError as e:
            raise NotSpecialUnitaryError(str(e)) from e
        det_residual = abs(self.det - 1)
        if det_residual > tol:
            raise NotSpecialUnitaryError(
                "determinant is not 1, |det - 1| = " + str(det_residual)
            )


class TangentDirection:
    """
    A skew-Hermitian Omega acting as Omega U on the tangent space at U
    """

    def __init__(self, omega, traceless: bool = False, tol: float = ALGEBRA_TOL):
        self._omega = as_complex_matrix(omega)
        scale = max(1.0, frobenius_norm(self._omega))
        residual = skew_hermitian_residual(self._omega)
        if residual > tol * scale:
            raise NotSkewHermitianError(
                "direction is not skew-Hermitian, residual " + str(residual)
            )
        if traceless and abs(trace(self._omega)) > tol * scale:
            raise NotSkewHermitianError(
                "direction is not traceless, |tr| = " + str(abs(trace(self._omega)))
            )
        self._traceless = traceless

    @property
    def omega(self) -> torch.Tensor:
        return self._omega

    @property
    def traceless(self) -> bool:
        return self._traceless

    @property
    def n(self) -> int:
        return self._omega.shape[0]

    def scale(self, factor: float) -> "TangentDirection":
        return TangentDirection(self._omega * factor, traceless=self._traceless)

    @staticmethod
    def project(matrix: torch.Tensor) -> "TangentDirection":
        """
        Traceless skew-Hermitian part of matrix
        """
        skew = (matrix - adjoint(matrix)) / 2
        n = skew.shape[0]
        skew = skew - trace(skew) / n * identity(n)
        return TangentDirection(skew, traceless=True)


class SuNBasis:
    def __init__(self, elements: tuple):
        self.__elements = elements

    @property
    def elements(self) -> tuple:
        return self.__elements

    @property
    def n(self) -> int:
        return self.__elements[0].n

    def __len__(self):
        return len(self.__elements)

    def __iter__(self):
        return iter(self.__elements)

    def combine(self, coefficients) -> TangentDirection:
        omega = torch.zeros((self.n, self.n), dtype=DTYPE)
        for coefficient, element in zip(coefficients, self.__elements):
            omega = omega + float(coefficient) * element.omega
        return TangentDirection(omega, traceless=True)

    def coordinates(self, direction: TangentDirection) -> torch.Tensor:
        return torch.tensor(
            [metric(element, direction) for element in self.__elements],
            dtype=torch.float64,
        )


def check_n(*objs) -> int:
    n = objs[0].n
    for obj in objs[1:]:
        if obj.n != n:
            raise DimensionMismatchError("dimension mismatch: %s vs %s" % (n, obj.n))
    return n


def ambient_metric(x: torch.Tensor, y: torch.Tensor) -> float:
    """
    Bi-invariant metric on ambient representatives, <X, Y> = Re tr(X^dagger Y) / 2
    """
    return 0.5 * torch.real(torch.sum(x.conj() * y)).item()


def metric(v: TangentDirection, w: TangentDirection, base: UnitaryPoint = None) -> float:
    # bi-invariance, base is irrelevant
    check_n(v, w)
    return ambient_metric(v.omega, w.omega)


def metric_norm(v: TangentDirection) -> float:
    return metric(v, v) ** 0.5


def _check_west_pole(det: complex) -> None:
    if abs(det + 1) < WEST_POLE_TOL:
        raise WestPoleError("determinant %s is at the west pole -1" % det)


def f_hw(u: UnitaryPoint) -> float:
    """
    Stereographic projection from the West of det u, zero exactly on SU(N)
    """
    det = u.det
    _check_west_pole(det)
    return det.imag / (det.real + 1)


def f_hw_differential(u: UnitaryPoint, direction: TangentDirection) -> float:
    check_n(u, direction)
    det = u.det
    _check_west_pole(det)
    value = -2j * det * trace(direction.omega) / (det + 1) ** 2
    assert abs(value.imag) <= ALGEBRA_TOL * max(1.0, abs(value))
    return value.real


def grad_f_hw(s: SpecialUnitaryPoint) -> torch.Tensor:
    """
    Gradient of F_hW at a point of SU(N), <i S, Omega S> = Im tr(Omega) / 2
    """
    return 1j * s.matrix


def hess_f_hw_quadratic(u: UnitaryPoint, direction: TangentDirection) -> float:
    check_n(u, direction)
    det = u.det
    _check_west_pole(det)
    tr = trace(direction.omega)
    value = 2j * det * tr**2 * (det - 1) / (det + 1) ** 3
    assert abs(value.imag) <= ALGEBRA_TOL * max(1.0, abs(value))
    return value.real


def hess_f_hw_bilinear(
    u: UnitaryPoint, first: TangentDirection, second: TangentDirection
) -> float:
    total = TangentDirection(first.omega + second.omega)
    return 0.5 * (
        hess_f_hw_quadratic(u, total)
        - hess_f_hw_quadratic(u, first)
        - hess_f_hw_quadratic(u, second)
    )


def _check_ambient_gradient(s: UnitaryPoint, grad_ambient: torch.Tensor) -> None:
    if grad_ambient.shape != s.matrix.shape:
        raise DimensionMismatchError(
            "gradient shape %s mismatches point" % (tuple(grad_ambient.shape),)
        )
    omega = grad_ambient @ adjoint(s.matrix)
    residual = skew_hermitian_residual(omega)
    if residual > ADMISSION_TOL * max(1.0, frobenius_norm(omega)):
        raise LandscapeError(
            "malformed ambient gradient, skew-Hermitian residual " + str(residual)
        )


def sun_gradient(s: SpecialUnitaryPoint, grad_ambient: torch.Tensor) -> torch.Tensor:
    """
    grad G(S) - tr(S^dagger grad G(S)) S / N
    """
    _check_ambient_gradient(s, grad_ambient)
    alpha = trace(adjoint(s.matrix) @ grad_ambient) / s.n
    return grad_ambient - alpha * s.matrix


def _f_hw_hessian_on_ambient(point: UnitaryPoint, tangent: torch.Tensor) -> float:
    return hess_f_hw_quadratic(
        point, TangentDirection(tangent @ adjoint(point.matrix))
    )


def f_hw_constraint_system() -> ConstraintSystem:
    return ConstraintSystem(
        gradients=[grad_f_hw], hessians=[_f_hw_hessian_on_ambient]
    )


def sun_gradient_by_engine(
    s: SpecialUnitaryPoint, grad_ambient: torch.Tensor
) -> torch.Tensor:
    _check_ambient_gradient(s, grad_ambient)
    return embedded_gradient(
        s, grad_ambient, f_hw_constraint_system(), ambient_metric
    )


def geodesic_step(
    s: SpecialUnitaryPoint, direction: TangentDirection, t: float
) -> SpecialUnitaryPoint:
    check_n(s, direction)
    if not direction.traceless:
        raise NotSkewHermitianError("geodesic on SU(N) needs a traceless direction")
    return SpecialUnitaryPoint(expm_skew(t * direction.omega) @ s.matrix)


def unitary_geodesic(u: UnitaryPoint, direction: TangentDirection, t: float) -> torch.Tensor:
    check_n(u, direction)
    return expm_skew(t * direction.omega) @ u.matrix


def project_to_special_unitary(matrix: torch.Tensor) -> torch.Tensor:
    """
    Nearest unitary by polar decomposition, then the determinant phase removed
    """
    u = polar_unitary(matrix)
    theta = cmath.phase(determinant(u))
    return u * cmath.exp(-1j * theta / u.shape[0])


def make_generator(seed: int) -> torch.Generator:
    generator = torch.Generator()
    generator.manual_seed(seed)
    return generator


def random_unitary(n: int, generator: torch.Generator) -> torch.Tensor:
    """
    Haar unitary from the QR decomposition of a complex Gaussian matrix with
    the diagonal of R re-phased into Q
    """
    z = torch.randn((n, n), dtype=DTYPE, generator=generator)
    q, r = torch.linalg.qr(z)
    d = torch.diagonal(r)
    return q * (d / d.abs())


def random_special_unitary(
    n: int, seed: int = None, generator: torch.Generator = None
) -> SpecialUnitaryPoint:
    if n < 2:
        raise LandscapeError("n must be at least 2")
    if generator is None:
        assert seed is not None
        generator = make_generator(seed)
    q = random_unitary(n, generator)
    theta = cmath.phase(determinant(q))
    return SpecialUnitaryPoint(q * cmath.exp(-1j * theta / n))


def random_direction(
    n: int,
    generator: torch.Generator,
    traceless: bool = True,
    norm: float = None,
) -> TangentDirection:
    """
    Gaussian skew-Hermitian direction, optionally scaled to a given metric norm
    """
    z = torch.randn((n, n), dtype=DTYPE, generator=generator)
    omega = (z - adjoint(z)) / 2
    if traceless:
        omega = omega - trace(omega) / n * identity(n)
    if norm is not None:
        omega = omega * (norm / ambient_metric(omega, omega) ** 0.5)
    return TangentDirection(omega, traceless=traceless)


@functools.lru_cache(maxsize=None)
def sun_basis(n: int) -> SuNBasis:
    """
    Generalized Gell-Mann matrices times i, normalized to tr(A^dagger B) = 2 delta
    """
    if n < 2:
        raise LandscapeError("n must be at least 2")
    elements = []
    for l in range(1, n):
        diagonal = torch.zeros(n, dtype=DTYPE)
        diagonal[:l] = 1
        diagonal[l] = -l
        elements.append(1j * math.sqrt(2 / (l * (l + 1))) * torch.diag(diagonal))
    for j in range(n):
        for k in range(j + 1, n):
            symmetric = torch.zeros((n, n), dtype=DTYPE)
            symmetric[j, k] = 1j
            symmetric[k, j] = 1j
            elements.append(symmetric)
            antisymmetric = torch.zeros((n, n), dtype=DTYPE)
            antisymmetric[j, k] = 1
            antisymmetric[k, j] = -1
            elements.append(antisymmetric)
    assert len(elements) == n * n - 1
    return SuNBasis(
        tuple(TangentDirection(element, traceless=True) for element in elements)
    )
