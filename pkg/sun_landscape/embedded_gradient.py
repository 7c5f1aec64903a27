from typing import Callable, List, Optional

import torch
from cyy_naive_lib.log import get_logger

from landscape_type import IrregularPointError, LandscapeError, NotTangentError

Metric = Callable[[torch.Tensor, torch.Tensor], float]


def euclidean_metric(x: torch.Tensor, y: torch.Tensor) -> float:
    return torch.real(torch.sum(x.conj() * y)).item()


class ConstraintSystem:
    """
    Constraint functions F_1..F_k given by their ambient gradients and,
    optionally, the quadratic forms of their ambient Hessians
    """

    def __init__(
        self,
        gradients: List[Callable],
        hessians: Optional[List[Callable]] = None,
    ):
        if not gradients:
            raise LandscapeError("need at least one constraint")
        if hessians is not None and len(hessians) != len(gradients):
            raise LandscapeError("gradient and hessian number mismatch")
        self.__gradients = gradients
        self.__hessians = hessians

    @property
    def k(self) -> int:
        return len(self.__gradients)

    @property
    def has_hessians(self) -> bool:
        return self.__hessians is not None

    def gradient_values(self, point) -> list:
        return [gradient(point) for gradient in self.__gradients]

    def hessian_quadratic(self, idx: int, point, tangent) -> float:
        if self.__hessians is None:
            raise LandscapeError("constraint hessians are not supplied")
        return self.__hessians[idx](point, tangent)


def gram_matrix(vectors: list, metric: Metric) -> torch.Tensor:
    k = len(vectors)
    gram = torch.zeros((k, k), dtype=torch.float64)
    for i in range(k):
        for j in range(i, k):
            gram[i, j] = metric(vectors[i], vectors[j])
            gram[j, i] = gram[i, j]
    return gram


def sigma(
    point,
    grad_G: torch.Tensor,
    constraints: ConstraintSystem,
    metric: Metric,
    max_condition_number: float = 1e12,
) -> torch.Tensor:
    """
    Lagrange multipliers solving Gram(F, F) sigma = (<grad G, grad F_i>)_i
    """
    constraint_gradients = constraints.gradient_values(point)
    gram = gram_matrix(constraint_gradients, metric)
    condition_number = torch.linalg.cond(gram).item()
    if not condition_number < max_condition_number:
        raise IrregularPointError(
            "not a regular point, Gram condition number is %s" % condition_number
        )
    rhs = torch.tensor(
        [metric(grad_G, g) for g in constraint_gradients], dtype=torch.float64
    )
    return torch.linalg.solve(gram, rhs)


def sigma_by_determinants(
    point, grad_G: torch.Tensor, constraints: ConstraintSystem, metric: Metric
) -> torch.Tensor:
    """
    The same multipliers as literal determinant ratios, sigma_i replaces the
    i-th column of the Gram matrix by the gradient pairings
    """
    constraint_gradients = constraints.gradient_values(point)
    gram = gram_matrix(constraint_gradients, metric)
    denominator = torch.linalg.det(gram).item()
    if denominator == 0:
        raise IrregularPointError("not a regular point, Gram determinant is 0")
    rhs = torch.tensor(
        [metric(grad_G, g) for g in constraint_gradients], dtype=torch.float64
    )
    result = torch.zeros(constraints.k, dtype=torch.float64)
    for i in range(constraints.k):
        replaced = gram.clone()
        replaced[:, i] = rhs
        result[i] = torch.linalg.det(replaced).item() / denominator
    return result


def embedded_gradient(
    point,
    grad_G: torch.Tensor,
    constraints: ConstraintSystem,
    metric: Metric,
) -> torch.Tensor:
    multipliers = sigma(point, grad_G, constraints, metric)
    result = grad_G.clone()
    for multiplier, constraint_gradient in zip(
        multipliers.tolist(), constraints.gradient_values(point)
    ):
        result = result - multiplier * constraint_gradient
    return result


def restricted_hessian_quadratic(
    point,
    hess_G: Callable,
    constraints: ConstraintSystem,
    multipliers: torch.Tensor,
    tangent: torch.Tensor,
    metric: Metric,
    tangent_tol: float = 1e-8,
) -> float:
    """
    Hess G(v, v) - sum_i sigma_i Hess F_i(v, v) for v tangent to every constraint
    """
    tangent_norm = metric(tangent, tangent) ** 0.5
    for constraint_gradient in constraints.gradient_values(point):
        pairing = abs(metric(tangent, constraint_gradient))
        gradient_norm = metric(constraint_gradient, constraint_gradient) ** 0.5
        if pairing > tangent_tol * max(tangent_norm * gradient_norm, 1e-300):
            raise NotTangentError(
                "vector is not tangent to the constraints, pairing " + str(pairing)
            )
    value = hess_G(point, tangent)
    for idx, multiplier in enumerate(multipliers.tolist()):
        if multiplier == 0:
            continue
        value -= multiplier * constraints.hessian_quadratic(idx, point, tangent)
    get_logger().debug("restricted hessian quadratic form is %s", value)
    return value
