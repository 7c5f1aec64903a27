import cmath
import math

import pytest
import torch
from landscape_type import (DimensionMismatchError, NotSkewHermitianError,
                            NotSpecialUnitaryError, NotUnitaryError,
                            WestPoleError)
from matrix_core import DTYPE, determinant, frobenius_norm, identity, trace
from sun_geometry import (SpecialUnitaryPoint, TangentDirection, UnitaryPoint,
                          ambient_metric, check_n, f_hw, f_hw_differential,
                          geodesic_step, grad_f_hw, hess_f_hw_bilinear,
                          hess_f_hw_quadratic, make_generator, metric,
                          metric_norm, project_to_special_unitary,
                          random_direction, random_special_unitary,
                          random_unitary, sun_basis, sun_gradient,
                          sun_gradient_by_engine, unitarity_residual,
                          unitary_geodesic)


def test_point_admission():
    SpecialUnitaryPoint(identity(3))
    with pytest.raises(NotUnitaryError):
        UnitaryPoint(2 * identity(2))
    with pytest.raises(NotSpecialUnitaryError):
        SpecialUnitaryPoint(1j * identity(3))
    # i I is in SU(4)
    SpecialUnitaryPoint(1j * identity(4))


def test_tangent_direction():
    with pytest.raises(NotSkewHermitianError):
        TangentDirection(identity(2))
    with pytest.raises(NotSkewHermitianError):
        TangentDirection(1j * identity(2), traceless=True)
    direction = TangentDirection.project(torch.tensor([[1, 2], [3, 4j]], dtype=DTYPE))
    assert direction.traceless
    assert abs(trace(direction.omega)) < 1e-15
    with pytest.raises(DimensionMismatchError):
        check_n(direction, UnitaryPoint(identity(3)))


def test_metric_is_bi_invariant():
    generator = make_generator(0)
    v = random_direction(3, generator)
    w = random_direction(3, generator)
    u = random_unitary(3, generator)
    assert abs(metric(v, w) - ambient_metric(v.omega @ u, w.omega @ u)) < 1e-12
    assert abs(metric(v, w) - ambient_metric(u @ v.omega, u @ w.omega)) < 1e-12
    unit = random_direction(4, generator, norm=1.0)
    assert abs(metric_norm(unit) - 1) < 1e-12


def test_random_special_unitary():
    generator = make_generator(1)
    for n in range(2, 7):
        s = random_special_unitary(n, generator=generator)
        assert unitarity_residual(s.matrix) < 1e-12
        assert abs(s.det - 1) < 1e-12
    first = random_special_unitary(4, seed=7)
    second = random_special_unitary(4, seed=7)
    assert torch.equal(first.matrix, second.matrix)


def test_f_hw():
    assert f_hw(UnitaryPoint(identity(3))) == 0
    theta = 0.4
    u = UnitaryPoint(torch.diag(torch.tensor([cmath.exp(1j * theta), 1, 1], dtype=DTYPE)))
    assert abs(f_hw(u) - math.tan(theta / 2)) < 1e-14
    west = torch.diag(torch.tensor([-1, 1], dtype=DTYPE))
    with pytest.raises(WestPoleError):
        f_hw(UnitaryPoint(west))


def test_constraint_geometry():
    generator = make_generator(2)
    for n in range(2, 7):
        s = random_special_unitary(n, generator=generator)
        assert abs(ambient_metric(grad_f_hw(s), grad_f_hw(s)) - n / 2) < 1e-12
        for _ in range(20):
            direction = random_direction(n, generator, traceless=False, norm=1.0)
            assert abs(hess_f_hw_quadratic(s, direction)) < 1e-12
            differential = f_hw_differential(s, direction)
            assert abs(differential - trace(direction.omega).imag / 2) < 1e-12
            pairing = ambient_metric(grad_f_hw(s), direction.omega @ s.matrix)
            assert abs(differential - pairing) < 1e-12
            h = 1e-5
            fd = (
                f_hw(UnitaryPoint(unitary_geodesic(s, direction, h)))
                - f_hw(UnitaryPoint(unitary_geodesic(s, direction, -h)))
            ) / (2 * h)
            assert abs(fd - differential) < 1e-6


def test_hess_f_hw_off_su():
    generator = make_generator(3)
    u = UnitaryPoint(random_unitary(3, generator))
    first = random_direction(3, generator, traceless=False)
    second = random_direction(3, generator, traceless=False)
    h = 1e-4
    fd = (
        f_hw(UnitaryPoint(unitary_geodesic(u, first, h)))
        - 2 * f_hw(u)
        + f_hw(UnitaryPoint(unitary_geodesic(u, first, -h)))
    ) / (h * h)
    assert abs(fd - hess_f_hw_quadratic(u, first)) < 1e-4 * max(1, abs(fd))
    asymmetry = hess_f_hw_bilinear(u, first, second) - hess_f_hw_bilinear(
        u, second, first
    )
    assert abs(asymmetry) < 1e-12


def test_sun_gradient_matches_engine():
    generator = make_generator(4)
    for n in range(2, 6):
        s = random_special_unitary(n, generator=generator)
        grad = random_direction(n, generator, traceless=False).omega @ s.matrix
        projected = sun_gradient(s, grad)
        assert frobenius_norm(projected - sun_gradient_by_engine(s, grad)) < 1e-10
        assert abs(ambient_metric(projected, grad_f_hw(s))) < 1e-12


def test_geodesic_step():
    generator = make_generator(5)
    s = random_special_unitary(4, generator=generator)
    direction = random_direction(4, generator)
    stepped = geodesic_step(s, direction, 0.7)
    assert abs(stepped.det - 1) < 1e-12
    back = geodesic_step(stepped, direction, -0.7)
    assert frobenius_norm(back.matrix - s.matrix) < 1e-12
    with pytest.raises(NotSkewHermitianError):
        geodesic_step(s, random_direction(4, generator, traceless=False), 0.1)


def test_project_to_special_unitary():
    generator = make_generator(6)
    s = random_special_unitary(3, generator=generator)
    noise = torch.randn((3, 3), dtype=DTYPE, generator=generator)
    drifted = s.matrix * (1 + 1e-7) + 1e-8 * noise
    projected = project_to_special_unitary(drifted)
    assert unitarity_residual(projected) < 1e-13
    assert abs(determinant(projected) - 1) < 1e-13
    assert frobenius_norm(projected - s.matrix) < 1e-6


def test_sun_basis():
    for n in range(2, 6):
        basis = sun_basis(n)
        assert len(basis) == n * n - 1
        gram = torch.tensor(
            [[metric(x, y) for y in basis] for x in basis], dtype=torch.float64
        )
        identity_gram = torch.eye(n * n - 1, dtype=torch.float64)
        assert (gram - identity_gram).abs().max().item() < 1e-14
    generator = make_generator(7)
    direction = random_direction(4, generator)
    basis = sun_basis(4)
    rebuilt = basis.combine(basis.coordinates(direction).tolist())
    assert frobenius_norm(rebuilt.omega - direction.omega) < 1e-12
