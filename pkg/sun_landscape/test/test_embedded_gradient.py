import pytest
import torch
from embedded_gradient import (ConstraintSystem, embedded_gradient,
                               euclidean_metric, restricted_hessian_quadratic,
                               sigma, sigma_by_determinants)
from fidelity_landscape import (TargetGate, ambient_gradient, fidelity,
                                hessian_quadratic, unitary_hessian_quadratic)
from landscape_type import IrregularPointError, NotTangentError
from matrix_core import adjoint
from sun_geometry import (TangentDirection, ambient_metric,
                          f_hw_constraint_system, geodesic_step,
                          make_generator, random_direction,
                          random_special_unitary)

E_Z = torch.tensor([0.0, 0.0, 1.0], dtype=torch.float64)


def sphere_constraint() -> ConstraintSystem:
    return ConstraintSystem(
        gradients=[lambda p: 2 * p],
        hessians=[lambda p, v: 2 * torch.dot(v, v).item()],
    )


def random_sphere_points(count: int):
    generator = torch.Generator()
    generator.manual_seed(0)
    points = torch.randn((count, 3), dtype=torch.float64, generator=generator)
    return points / points.norm(dim=1, keepdim=True)


def test_sphere_gradient():
    constraints = sphere_constraint()
    for p in random_sphere_points(100):
        gradient = embedded_gradient(p, E_Z, constraints, euclidean_metric)
        assert (gradient - (E_Z - p[2] * p)).abs().max().item() < 1e-12
        assert abs(torch.dot(gradient, p).item()) < 1e-12


def test_sigma_by_determinants():
    constraints = ConstraintSystem(
        gradients=[
            lambda p: 2 * p,
            lambda p: torch.tensor([1.0, 1.0, 0.0], dtype=torch.float64),
        ]
    )
    p = torch.tensor([0.6, 0.0, 0.8], dtype=torch.float64)
    solved = sigma(p, E_Z, constraints, euclidean_metric)
    by_determinants = sigma_by_determinants(p, E_Z, constraints, euclidean_metric)
    assert (solved - by_determinants).abs().max().item() < 1e-12


def test_irregular_point():
    constraints = sphere_constraint()
    with pytest.raises(IrregularPointError):
        sigma(torch.zeros(3, dtype=torch.float64), E_Z, constraints, euclidean_metric)


def test_restricted_hessian():
    constraints = sphere_constraint()
    north = E_Z.clone()
    multipliers = sigma(north, E_Z, constraints, euclidean_metric)
    assert abs(multipliers[0].item() - 0.5) < 1e-15
    tangent = torch.tensor([0.3, -0.4, 0.0], dtype=torch.float64)
    value = restricted_hessian_quadratic(
        north, lambda p, v: 0.0, constraints, multipliers, tangent, euclidean_metric
    )
    assert abs(value + 0.25) < 1e-12
    with pytest.raises(NotTangentError):
        restricted_hessian_quadratic(
            north, lambda p, v: 0.0, constraints, multipliers, north, euclidean_metric
        )


def test_restricted_hessian_on_special_unitary():
    constraints = f_hw_constraint_system()
    generator = make_generator(5)

    for n in range(2, 5):
        a = TargetGate(random_special_unitary(n, generator=generator).matrix)

        def hess_G(point, tangent):
            return unitary_hessian_quadratic(
                a, point, TangentDirection(tangent @ adjoint(point.matrix))
            )

        for _ in range(5):
            s = random_special_unitary(n, generator=generator)
            multipliers = sigma(s, ambient_gradient(a, s), constraints, ambient_metric)
            direction = random_direction(n, generator)
            tangent = direction.omega @ s.matrix
            restricted = restricted_hessian_quadratic(
                s, hess_G, constraints, multipliers, tangent, ambient_metric
            )
            # Hess F_hW vanishes on traceless directions at det = 1
            unconstrained = restricted_hessian_quadratic(
                s, hess_G, constraints, torch.zeros(1), tangent, ambient_metric
            )
            expected = hessian_quadratic(a, s, direction)
            assert abs(restricted - unconstrained) < 1e-10
            assert abs(restricted - expected) < 1e-10

            h = 1e-4
            second_difference = (
                fidelity(a, geodesic_step(s, direction, h))
                - 2 * fidelity(a, s)
                + fidelity(a, geodesic_step(s, direction, -h))
            ) / h**2
            assert abs(second_difference - restricted) < 1e-5 * max(
                1.0, abs(restricted)
            )
