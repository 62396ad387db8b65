# geometry.py

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import OutsideBall, SingularSystem

# Pair representatives; each set also contains the negatives.
GAMMA1_PAIRS = ((Fraction(1), Fraction(0)), (Fraction(3, 5), Fraction(4, 5)), (Fraction(3, 5), Fraction(-4, 5)))
GAMMA2_PAIRS = ((Fraction(0), Fraction(1)), (Fraction(4, 5), Fraction(3, 5)), (Fraction(-4, 5), Fraction(3, 5)))

SAFETY = Fraction(95, 100)


class Parity(Enum):
    ODD = 1   # Γ₁
    EVEN = 2  # Γ₂

    @classmethod
    def of(cls, j: int) -> "Parity":
        return cls.ODD if j % 2 else cls.EVEN


def _rank_one(k) -> Tuple[Fraction, Fraction, Fraction]:
    """Entries (11, 12, 22) of k^⊥⊗k^⊥ with k^⊥ = (−k₂, k₁)."""
    return (k[1] * k[1], -k[0] * k[1], k[0] * k[0])


def _invert(matrix):
    """Exact Gauss-Jordan inverse of a 3x3 Fraction matrix."""
    n = len(matrix)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem("rank-one tensors of the direction set are linearly dependent")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class DirectionSet:
    """One of Γ₁, Γ₂: pair representatives and the exact linear map R ↦ (c_k(R)) per pair."""
    pairs: Tuple[Tuple[Fraction, Fraction], ...]
    inverse: Tuple[Tuple[Fraction, ...], ...]

    @property
    def directions(self) -> np.ndarray:
        """All six unit vectors, pairs first then their negatives."""
        reps = np.array([[float(a), float(b)] for a, b in self.pairs])
        return np.concatenate([reps, -reps])

    @property
    def inverse_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.inverse])

    def coefficients_exact(self, r11: Fraction, r12: Fraction, r22: Fraction) -> Tuple[Fraction, ...]:
        return tuple(row[0] * r11 + row[1] * r12 + row[2] * r22 for row in self.inverse)

    def coefficients(self, r11, r12, r22) -> np.ndarray:
        """c_k(R) per pair; broadcasts over array-valued entries."""
        M = self.inverse_float
        return np.stack([M[i, 0] * np.asarray(r11) + M[i, 1] * np.asarray(r12) + M[i, 2] * np.asarray(r22)
                         for i in range(3)])

    def radius(self) -> Fraction:
        """Largest entrywise-sup radius around Id on which every c_k stays positive."""
        at_id = self.coefficients_exact(Fraction(1), Fraction(0), Fraction(1))
        return min(c / sum(abs(v) for v in row) for c, row in zip(at_id, self.inverse))


def build_direction_set(pairs) -> DirectionSet:
    matrix = [[_rank_one(k)[row] for k in pairs] for row in range(3)]
    return DirectionSet(pairs=tuple(pairs), inverse=tuple(tuple(r) for r in _invert(matrix)))


@dataclass(frozen=True)
class DirectionSystem:
    """Γ₁, Γ₂ and the common positivity radius ε_γ (entrywise sup norm on matrices)."""
    gamma1: DirectionSet
    gamma2: DirectionSet
    eps_gamma: float
    eps_exact: Fraction

    def select(self, parity: Parity) -> DirectionSet:
        return self.gamma1 if parity is Parity.ODD else self.gamma2

    def all_directions(self) -> np.ndarray:
        return np.concatenate([self.gamma1.directions, self.gamma2.directions])

    def to_dict(self) -> dict:
        return {
            "gamma1": [[str(a), str(b)] for a, b in self.gamma1.pairs],
            "gamma2": [[str(a), str(b)] for a, b in self.gamma2.pairs],
            "eps_gamma": self.eps_gamma,
            "eps_gamma_exact": str(self.eps_exact),
            "ball_norm": "entrywise sup",
        }


def build_direction_system() -> DirectionSystem:
    """
    Build Γ₁ = {±(1,0), ±(3/5,4/5), ±(3/5,−4/5)} and Γ₂ = {±(0,1), ±(4/5,3/5), ±(−4/5,3/5)}.

    ε_γ is the smaller of the two exact positivity radii shrunk by 5%.

    Raises:
        SingularSystem: If a set's rank-one tensors are linearly dependent.
    """
    g1 = build_direction_set(GAMMA1_PAIRS)
    g2 = build_direction_set(GAMMA2_PAIRS)
    eps = SAFETY * min(g1.radius(), g2.radius())
    return DirectionSystem(gamma1=g1, gamma2=g2, eps_gamma=float(eps), eps_exact=eps)


def ball_distance(r11, r12, r22) -> float:
    """‖R − Id‖ in the entrywise sup norm."""
    return float(max(np.max(np.abs(np.asarray(r11) - 1.0)), np.max(np.abs(np.asarray(r12))),
                     np.max(np.abs(np.asarray(r22) - 1.0))))


def gamma_coeffs(sys: DirectionSystem, parity: Parity, R, slack: float = 0.0) -> Dict[Tuple[float, float], object]:
    """
    γ_k(R) = c_k(R)^{1/2} for every k of the parity's set, with γ_k = γ_{−k}.

    Args:
        sys: The direction system.
        parity: ODD selects Γ₁, EVEN selects Γ₂.
        R: Either a 2x2 array or a tuple (R¹¹, R¹², R²²) of equally shaped arrays.
        slack: Relative tolerance on the ball radius.

    Raises:
        OutsideBall: If ‖R − Id‖ exceeds ε_γ.
    """
    r11, r12, r22 = _entries(R)
    distance = ball_distance(r11, r12, r22)
    if distance > sys.eps_gamma * (1.0 + slack):
        raise OutsideBall(f"‖R − Id‖ = {distance:.6f} exceeds ε_γ = {sys.eps_gamma:.6f}")
    dset = sys.select(parity)
    gammas = np.sqrt(dset.coefficients(r11, r12, r22))
    out = {}
    for i, (a, b) in enumerate(dset.pairs):
        out[(float(a), float(b))] = gammas[i]
        out[(-float(a), -float(b))] = gammas[i]
    return out


def _entries(R):
    if isinstance(R, tuple):
        return R
    R = np.asarray(R, dtype=float)
    return R[0, 0], 0.5 * (R[0, 1] + R[1, 0]), R[1, 1]


def reconstruct(dset: DirectionSet, gammas: Dict[Tuple[float, float], object]) -> np.ndarray:
    """½ Σ_k γ_k² (k^⊥⊗k^⊥) over all six directions, as a 2x2 matrix."""
    out = np.zeros((2, 2))
    for k in dset.directions:
        g = float(gammas[(float(k[0]), float(k[1]))])
        kp = np.array([-k[1], k[0]])
        out += 0.5 * g * g * np.outer(kp, kp)
    return out


def sample_ball(sys: DirectionSystem, count: int, rng: np.random.Generator,
                include_vertices: bool = True) -> np.ndarray:
    """Symmetric matrices (count, 3) as (R¹¹, R¹², R²²) drawn uniformly from the entrywise ball."""
    eps = sys.eps_gamma
    samples = 1.0 + np.zeros((count, 3))
    samples[:, 1] = 0.0
    samples += rng.uniform(-eps, eps, size=(count, 3))
    if include_vertices:
        corners = np.array([[1 + s1 * eps, s2 * eps, 1 + s3 * eps]
                            for s1 in (-1, 1) for s2 in (-1, 1) for s3 in (-1, 1)])
        samples = np.concatenate([corners, samples])
    return samples


def max_gamma(sys: DirectionSystem, count: int = 10_000, seed: Optional[int] = 0) -> float:
    """sup_k sup_R γ_k(R) over a dense sample of the ball, both sets."""
    rng = np.random.default_rng(seed)
    R = sample_ball(sys, count, rng)
    best = 0.0
    for dset in (sys.gamma1, sys.gamma2):
        c = dset.coefficients(R[:, 0], R[:, 1], R[:, 2])
        best = max(best, float(np.sqrt(np.max(c))))
    return best


def lattice_checks(sys: DirectionSystem) -> Dict[str, bool]:
    """Exhaustive checks of lattice membership, symmetry, disjointness and separation."""
    sets = [sys.gamma1, sys.gamma2]
    full = []
    for dset in sets:
        pts = [(a, b) for a, b in dset.pairs] + [(-a, -b) for a, b in dset.pairs]
        full.append(pts)
    lattice = all((5 * a).denominator == 1 and (5 * b).denominator == 1 for pts in full for a, b in pts)
    unit = all(a * a + b * b == 1 for pts in full for a, b in pts)
    symmetric = all((-a, -b) in pts for pts in full for a, b in pts)
    disjoint = not set(full[0]) & set(full[1])
    separated = True
    for pts in full:
        for k in pts:
            for kk in pts:
                s = (k[0] + kk[0], k[1] + kk[1])
                if s != (0, 0) and s[0] * s[0] + s[1] * s[1] < Fraction(1, 4):
                    separated = False
    return {"lattice": lattice, "unit": unit, "symmetric": symmetric, "disjoint": disjoint, "separated": separated}


def directions_of(sys: DirectionSystem, parity: Parity) -> Sequence[np.ndarray]:
    return list(sys.select(parity).directions)
