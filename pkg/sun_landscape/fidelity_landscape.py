import torch
from cyy_naive_lib.log import get_logger

from landscape_type import (CriticalNature, LandscapeError, NotCriticalError,
                            NotUnitaryError)
from matrix_core import (adjoint, as_complex_matrix, determinant,
                         expm_skew_minus_identity, frobenius_norm, identity,
                         trace)
from sun_geometry import (ADMISSION_TOL, ALGEBRA_TOL, SpecialUnitaryPoint,
                          SuNBasis, TangentDirection, UnitaryPoint, check_n,
                          unitarity_residual)


class TargetGate:
    def __init__(self, matrix):
        self.__matrix = as_complex_matrix(matrix)
        residual = unitarity_residual(self.__matrix)
        if residual > ADMISSION_TOL:
            raise NotUnitaryError("target is not unitary, residual " + str(residual))
        self.__su_mode = abs(determinant(self.__matrix) - 1) <= ADMISSION_TOL

    @staticmethod
    def identity(n: int) -> "TargetGate":
        return TargetGate(identity(n))

    @property
    def matrix(self) -> torch.Tensor:
        return self.__matrix

    @property
    def n(self) -> int:
        return self.__matrix.shape[0]

    @property
    def su_mode(self) -> bool:
        return self.__su_mode


class HessianSpectrum:
    def __init__(self, matrix: torch.Tensor, zero_tol_factor: float = 1e-9):
        self.__matrix = matrix
        self.__eigenvalues = torch.linalg.eigvalsh(matrix)
        scale = max(1.0, self.__eigenvalues.abs().max().item())
        self.__zero_tol = zero_tol_factor * scale
        self.__n_pos = int((self.__eigenvalues > self.__zero_tol).sum().item())
        self.__n_neg = int((self.__eigenvalues < -self.__zero_tol).sum().item())
        self.__n_zero = len(self.__eigenvalues) - self.__n_pos - self.__n_neg

    @property
    def matrix(self) -> torch.Tensor:
        return self.__matrix

    @property
    def eigenvalues(self) -> torch.Tensor:
        return self.__eigenvalues

    @property
    def zero_tol(self) -> float:
        return self.__zero_tol

    @property
    def n_pos(self) -> int:
        return self.__n_pos

    @property
    def n_neg(self) -> int:
        return self.__n_neg

    @property
    def n_zero(self) -> int:
        return self.__n_zero

    @property
    def is_mixed(self) -> bool:
        return self.__n_pos > 0 and self.__n_neg > 0

    def __str__(self):
        return "n_pos:%s n_neg:%s n_zero:%s" % (self.n_pos, self.n_neg, self.n_zero)


def fidelity(a: TargetGate, u: UnitaryPoint) -> float:
    """
    Re tr(A^dagger U), the trace fidelity without the 1/N factor
    """
    check_n(a, u)
    return torch.real(torch.sum(a.matrix.conj() * u.matrix)).item()


def least_squares_cost(a: TargetGate, u: UnitaryPoint) -> float:
    check_n(a, u)
    return frobenius_norm(a.matrix - u.matrix) ** 2


def reduce_point(a: TargetGate, s: SpecialUnitaryPoint) -> SpecialUnitaryPoint:
    """
    A^dagger S, the point of the identity-target problem equivalent to S
    """
    check_n(a, s)
    return SpecialUnitaryPoint(adjoint(a.matrix) @ s.matrix)


def _commutator_part(a: TargetGate, u: UnitaryPoint) -> torch.Tensor:
    # A U^dagger - U A^dagger, skew-Hermitian
    x = a.matrix @ adjoint(u.matrix)
    return x - adjoint(x)


def ambient_gradient(a: TargetGate, u: UnitaryPoint) -> torch.Tensor:
    check_n(a, u)
    return _commutator_part(a, u) @ u.matrix


def fidelity_gradient_direction(a: TargetGate, s: SpecialUnitaryPoint) -> TangentDirection:
    """
    Traceless Omega with Omega S equal to the SU(N) gradient of the fidelity
    """
    check_n(a, s)
    x = _commutator_part(a, s)
    omega = x - trace(x) / s.n * identity(s.n)
    # second pass removes the rounding residue of the first
    omega = omega - trace(omega) / s.n * identity(s.n)
    return TangentDirection(omega, traceless=True)


def sun_fidelity_gradient(a: TargetGate, s: SpecialUnitaryPoint) -> torch.Tensor:
    return fidelity_gradient_direction(a, s).omega @ s.matrix


def criticality_residual(a: TargetGate, s: UnitaryPoint) -> tuple:
    """
    Fit A S^dagger - S A^dagger = mu i I and return (mu, residual)
    """
    check_n(a, s)
    x = _commutator_part(a, s)
    mu_hat = (-1j * trace(x)).real / s.n
    residual = frobenius_norm(x - 1j * mu_hat * identity(s.n))
    return mu_hat, residual


def _hessian_weight(a: TargetGate, u: UnitaryPoint) -> torch.Tensor:
    x = u.matrix @ adjoint(a.matrix)
    return x + adjoint(x)


def unitary_hessian_quadratic(
    a: TargetGate, u: UnitaryPoint, direction: TangentDirection
) -> float:
    """
    tr(Omega^2 (U A^dagger + A U^dagger)) / 2 for any Omega in u(N)
    """
    check_n(a, u, direction)
    omega = direction.omega
    value = trace(omega @ omega @ _hessian_weight(a, u)) / 2
    assert abs(value.imag) <= ALGEBRA_TOL * max(1.0, abs(value))
    return value.real


def hessian_quadratic(
    a: TargetGate, s: SpecialUnitaryPoint, direction: TangentDirection
) -> float:
    if not direction.traceless:
        raise LandscapeError("SU(N) hessian needs a traceless direction")
    return unitary_hessian_quadratic(a, s, direction)


def hessian_bilinear(
    a: TargetGate,
    s: SpecialUnitaryPoint,
    first: TangentDirection,
    second: TangentDirection,
) -> float:
    check_n(a, s, first, second)
    anticommutator = first.omega @ second.omega + second.omega @ first.omega
    value = trace(anticommutator @ _hessian_weight(a, s)) / 4
    assert abs(value.imag) <= ALGEBRA_TOL * max(1.0, abs(value))
    return value.real


def hessian_matrix(
    a: TargetGate, s: SpecialUnitaryPoint, basis: SuNBasis
) -> HessianSpectrum:
    """
    H_ab = tr((O_a O_b + O_b O_a)(S A^dagger + A S^dagger)) / 4 in an
    orthonormal su(N) basis
    """
    check_n(a, s, basis)
    elements = torch.stack([element.omega for element in basis])
    weighted = elements @ _hessian_weight(a, s)
    products = torch.einsum("aij,bji->ab", elements, weighted)
    raw = torch.real(products) / 2
    asymmetry = frobenius_norm(raw - raw.T)
    assert asymmetry <= ALGEBRA_TOL * max(1.0, frobenius_norm(raw)), asymmetry
    return HessianSpectrum((raw + raw.T) / 2)


def classify(
    a: TargetGate,
    s: SpecialUnitaryPoint,
    spectrum: HessianSpectrum,
    global_max: float,
    global_min: float,
    tol: float = 1e-8,
    value_tol: float = 1e-9,
) -> CriticalNature:
    if not a.su_mode:
        raise LandscapeError("nature labels need a target in SU(N)")
    _, residual = criticality_residual(a, s)
    if residual > tol:
        raise NotCriticalError("point is not critical, residual " + str(residual))
    if spectrum.is_mixed:
        return CriticalNature.Saddle
    if spectrum.n_zero > 0:
        get_logger().debug("degenerate spectrum %s", spectrum)
        return CriticalNature.Degenerate
    value = fidelity(a, s)
    if spectrum.n_neg > 0:
        if abs(value - global_max) <= value_tol:
            return CriticalNature.GlobalMax
        return CriticalNature.LocalMaxNotGlobal
    if abs(value - global_min) <= value_tol:
        return CriticalNature.GlobalMin
    return CriticalNature.LocalMinNotGlobal


def fidelity_increment(
    a: TargetGate, s: SpecialUnitaryPoint, direction: TangentDirection, t: float
) -> float:
    """
    G(exp(t Omega) S) - G(S) without the cancellation of subtracting two
    nearly equal fidelities
    """
    check_n(a, s, direction)
    delta = expm_skew_minus_identity(t * direction.omega) @ s.matrix
    return torch.real(torch.sum(a.matrix.conj() * delta)).item()
