import dataclasses
import json
import math
import re
from typing import List, Optional

import torch
from cyy_naive_lib.log import get_logger

from fidelity_landscape import TargetGate, criticality_residual
from landscape_type import (AmbiguousMatchError, CriticalNature,
                            InvariantViolationError, LandscapeError,
                            NotCriticalError)
from matrix_core import DTYPE, adjoint, hermitian_eig, identity
from sun_geometry import (SpecialUnitaryPoint, TangentDirection, UnitaryPoint,
                          check_n, metric_norm)

# cos(theta) of a root on the imaginary axis is ~6e-17, not 0
RE_Z_TOL = 1e-15
VALUE_TOL = 1e-12
_REAL_PLACEHOLDER = re.compile(r"\"__real_(\d+)__\"")


@dataclasses.dataclass(frozen=True)
class CriticalFamily:
    """
    The critical points S_{kplus,mu}(U) = U^dagger (D_{kplus,mu} - mu i I / 2) U
    for all unitary U
    """

    n: int
    kplus: int
    mu: float
    value: float
    nature: CriticalNature
    is_continuum: bool = False
    z: complex = 1 + 0j
    degenerate: bool = False

    @property
    def label(self) -> str:
        if self.is_continuum:
            return "S_{%s,[-2,2]}" % self.kplus
        return "S_{%s,%.6f}" % (self.kplus, self.mu)

    def to_json_dict(self) -> dict:
        return {
            "kplus": self.kplus,
            "mu": self.mu,
            "value": self.value,
            "nature": self.nature.name,
            "is_continuum": self.is_continuum,
            "z_re": self.z.real,
            "z_im": self.z.imag,
        }


class CatalogEntryPoint:
    def __init__(
        self,
        family: CriticalFamily,
        conjugator: UnitaryPoint,
        s: SpecialUnitaryPoint,
        mu: float,
    ):
        self.__family = family
        self.__conjugator = conjugator
        self.__s = s
        self.__mu = mu

    @property
    def family(self) -> CriticalFamily:
        return self.__family

    @property
    def conjugator(self) -> UnitaryPoint:
        return self.__conjugator

    @property
    def s(self) -> SpecialUnitaryPoint:
        return self.__s

    @property
    def mu(self) -> float:
        return self.__mu


def _unit_roots(power: int, sign: int) -> List[complex]:
    """
    Solutions of z^power = sign with Re(z) >= 0, angles in closed form and
    conjugate roots mirrored exactly
    """
    m = abs(power)
    offset = 0.0 if sign == 1 else math.pi
    roots = []
    for j in range(m):
        theta = (2 * j * math.pi + offset) / m
        if theta > math.pi:
            continue
        re = math.cos(theta)
        if re < -RE_Z_TOL:
            continue
        if abs(re) <= RE_Z_TOL:
            z = complex(0.0, 1.0)
        else:
            z = complex(re, math.sin(theta))
        roots.append(z)
        if z.imag != 0:
            roots.append(z.conjugate())
    return sorted(roots, key=lambda z: z.imag)


def closed_form_global_min_mu(n: int) -> List[float]:
    if n % 2 == 0:
        return [0.0]
    p = (n - 1) // 2
    mu = 2 * math.sin(2 * p * math.pi / (2 * p + 1))
    return [-mu, mu]


def enumerate_families(n: int) -> List[CriticalFamily]:
    """
    All critical families of Re tr(S) on SU(n), from kplus = n down to 0
    """
    if n < 2:
        raise LandscapeError("n must be at least 2")
    raw = []
    for kplus in range(n, -1, -1):
        power = n - 2 * kplus
        sign = (-1) ** (n - kplus)
        if power == 0:
            if sign == 1:
                raw.append((kplus, 0.0, 1 + 0j, True))
            continue
        for z in _unit_roots(power, sign):
            raw.append((kplus, 2 * z.imag, z, False))

    values = [z.real * (2 * kplus - n) for kplus, _, z, _ in raw]
    global_max = max(values)
    global_min = min(values)
    families = []
    for (kplus, mu, z, is_continuum), value in zip(raw, values):
        degenerate = not is_continuum and z.real == 0
        if is_continuum or degenerate or 0 < kplus < n:
            nature = CriticalNature.Saddle
        elif kplus == n:
            nature = (
                CriticalNature.GlobalMax
                if abs(value - global_max) <= VALUE_TOL
                else CriticalNature.LocalMaxNotGlobal
            )
        else:
            nature = (
                CriticalNature.GlobalMin
                if abs(value - global_min) <= VALUE_TOL
                else CriticalNature.LocalMinNotGlobal
            )
        families.append(
            CriticalFamily(
                n=n,
                kplus=kplus,
                mu=mu,
                value=value,
                nature=nature,
                is_continuum=is_continuum,
                z=z,
                degenerate=degenerate,
            )
        )
    _check_global_min_index(n, families)
    get_logger().debug("enumerated %s critical families for n=%s", len(families), n)
    return families


def _check_global_min_index(n: int, families: List[CriticalFamily]) -> bool:
    by_value = sorted(
        f.mu for f in families if f.nature == CriticalNature.GlobalMin
    )
    by_index = closed_form_global_min_mu(n)
    agree = len(by_value) == len(by_index) and all(
        abs(a - b) <= 1e-12 for a, b in zip(by_value, by_index)
    )
    if not agree:
        get_logger().warning(
            "global minima from value comparison %s differ from the index "
            "formula %s, keep the former",
            by_value,
            by_index,
        )
    return agree


def trap_report(n: int) -> List[CriticalFamily]:
    """
    Local extrema which are not global, empty iff the landscape is trap free
    """
    return [f for f in enumerate_families(n) if f.nature.is_trap()]


def sample_continuum(k: int) -> List[float]:
    if k < 1:
        raise LandscapeError("need at least one sample")
    if k == 1:
        return [0.0]
    return torch.linspace(-2, 2, k, dtype=torch.float64).tolist()


def canonical_diagonal(n: int, kplus: int, mu: float) -> torch.Tensor:
    """
    D_{kplus,mu} - mu i I / 2 as a vector of diagonal entries
    """
    c = math.sqrt(max(0.0, 1 - mu * mu / 4))
    signs = torch.ones(n, dtype=torch.float64)
    signs[kplus:] = -1
    return (c * signs).to(DTYPE) - 0.5j * mu


def materialize(
    family: CriticalFamily, u: UnitaryPoint, mu: Optional[float] = None
) -> CatalogEntryPoint:
    check_n(family, u)
    if family.is_continuum:
        if mu is None:
            raise LandscapeError("a continuum family needs a concrete mu")
        if not -2 <= mu <= 2:
            raise LandscapeError("mu must lie in [-2, 2]:" + str(mu))
    else:
        if mu is not None and mu != family.mu:
            raise LandscapeError("mu %s is not the family mu %s" % (mu, family.mu))
        mu = family.mu
    diagonal = canonical_diagonal(family.n, family.kplus, mu)
    matrix = adjoint(u.matrix) @ (diagonal.unsqueeze(-1) * u.matrix)
    try:
        s = SpecialUnitaryPoint(matrix)
    except LandscapeError as e:
        raise InvariantViolationError("materialized point is invalid: " + str(e)) from e
    _, residual = criticality_residual(TargetGate.identity(family.n), s)
    if residual > 1e-10:
        raise InvariantViolationError(
            "materialized point is not critical, residual " + str(residual)
        )
    return CatalogEntryPoint(family, u, s, mu)


def match(
    s: SpecialUnitaryPoint, catalog: List[CriticalFamily], tol: float
) -> Optional[CriticalFamily]:
    """
    The family of a critical point of Re tr(S), read from the two-point
    spectrum of S
    """
    n = s.n
    mu_hat, residual = criticality_residual(TargetGate.identity(n), s)
    if residual > tol:
        raise NotCriticalError("point is not critical, residual " + str(residual))
    cluster_tol = max(tol, 1e-14) ** 0.5
    w = s.matrix + 0.5j * mu_hat * identity(n)
    eigenvalues, _ = hermitian_eig((w + adjoint(w)) / 2)
    magnitudes = eigenvalues.abs()
    candidates = [f for f in catalog if f.n == n]
    if magnitudes.max().item() <= cluster_tol:
        # mu = +-2, every kplus gives the same matrix
        degenerate = [
            f
            for f in candidates
            if f.is_continuum or (f.degenerate and abs(f.mu - mu_hat) <= cluster_tol)
        ]
        if not degenerate:
            return None
        degenerate.sort(key=lambda f: not f.is_continuum)
        return degenerate[0]
    if (magnitudes.max() - magnitudes.min()).item() > cluster_tol:
        raise AmbiguousMatchError(
            "eigenvalues %s do not form a two-point spectrum" % eigenvalues.tolist()
        )
    kplus = int((eigenvalues > 0).sum().item())
    for family in candidates:
        if family.kplus != kplus:
            continue
        if family.is_continuum or abs(family.mu - mu_hat) <= cluster_tol:
            return family
    return None


def saddle_witness_directions(family: CriticalFamily, u: UnitaryPoint) -> tuple:
    """
    Two unit directions U^dagger diag(i d) U along which the Hessian of the
    materialized point is positive and negative respectively
    """
    n, kplus = family.n, family.kplus
    if not 0 < kplus < n or family.degenerate:
        raise LandscapeError("no saddle witnesses for " + family.label)

    def direction(big_block: range, small_block: range) -> TangentDirection:
        d = torch.zeros(n, dtype=torch.float64)
        if len(big_block) >= 2:
            d[big_block[0]] = 1
            d[big_block[1]] = -1
        else:
            d[big_block[0]] = 2
            d[small_block[0]] = -1
            d[small_block[1]] = -1
        omega = adjoint(u.matrix) @ ((1j * d.to(DTYPE)).unsqueeze(-1) * u.matrix)
        tangent = TangentDirection(omega, traceless=True)
        return tangent.scale(1 / metric_norm(tangent))

    plus_block = range(0, kplus)
    minus_block = range(kplus, n)
    return direction(minus_block, plus_block), direction(plus_block, minus_block)


def format_real(x: float) -> str:
    return format(x, ".17g")


def catalog_to_json(families: List[CriticalFamily]) -> str:
    """
    JSON array of families with every real written to 17 significant digits
    """
    reals: List[str] = []

    def hold_real(value):
        if isinstance(value, float):
            reals.append(format_real(value))
            return "__real_%s__" % (len(reals) - 1)
        return value

    records = [
        {key: hold_real(value) for key, value in family.to_json_dict().items()}
        for family in families
    ]
    text = json.dumps(records, indent=2)
    return _REAL_PLACEHOLDER.sub(lambda m: reals[int(m.group(1))], text) + "\n"


def format_table(families: List[CriticalFamily]) -> str:
    lines = ["%6s %22s %22s %18s %10s" % ("kplus", "mu", "value", "nature", "continuum")]
    for family in families:
        lines.append(
            "%6d %22s %22s %18s %10s"
            % (
                family.kplus,
                "[-2,2]" if family.is_continuum else format_real(family.mu),
                format_real(family.value),
                family.nature.name,
                family.is_continuum,
            )
        )
    return "\n".join(lines)
