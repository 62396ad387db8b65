# iterate/cutoffs.py

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from ..spectral.symbols import smooth_step

PLATEAU = 0.25
SUPPORT = 0.75


def base_bump(u):
    """ĉ(u): 1 on |u| <= 1/4, smooth decay to 0 at |u| = 3/4."""
    a = np.abs(np.asarray(u, dtype=float))
    return np.where(a <= PLATEAU, 1.0, smooth_step((a - PLATEAU) / (SUPPORT - PLATEAU)))


def chi(u):
    """χ = ĉ / (Σ_i ĉ(· − i)²)^{1/2}; Σ_j χ(u − j)² = 1 for every u."""
    u = np.asarray(u, dtype=float)
    centre = np.floor(u + 0.5)
    total = np.zeros_like(u)
    for shift in (-1.0, 0.0, 1.0):
        total = total + base_bump(u - (centre + shift)) ** 2
    return base_bump(u) / np.sqrt(total)


@dataclass(frozen=True)
class CutoffFamily:
    """χ_j(t) = χ(t/τ − j) for j in [j_min, j_max]."""
    tau: float
    j_min: int
    j_max: int

    @property
    def indices(self) -> List[int]:
        return list(range(self.j_min, self.j_max + 1))

    def anchor(self, j: int) -> float:
        return self.tau * j

    def value(self, j: int, t):
        return chi(np.asarray(t, dtype=float) / self.tau - j)

    def active(self, t: float) -> List[int]:
        """Slices with χ_j(t) != 0."""
        u = t / self.tau
        return [j for j in range(int(math.floor(u - SUPPORT)), int(math.ceil(u + SUPPORT)) + 1)
                if self.j_min <= j <= self.j_max and abs(u - j) < SUPPORT]

    def targets(self, j: int, ks: np.ndarray, dt: float) -> np.ndarray:
        """Grid indices among ks where χ_j is nonzero."""
        u = ks * dt / self.tau - j
        return ks[np.abs(u) < SUPPORT]

    def partition_defect(self, t: np.ndarray) -> float:
        """max |Σ_j χ_j(t)² − 1| over the family."""
        total = np.zeros_like(np.asarray(t, dtype=float))
        for j in self.indices:
            total = total + self.value(j, t) ** 2
        return float(np.max(np.abs(total - 1.0)))

    def max_active(self, t: np.ndarray) -> int:
        count = np.zeros_like(np.asarray(t, dtype=float))
        for j in self.indices:
            count = count + (self.value(j, t) != 0)
        return int(count.max())


def cutoff_family(sched, q: int, t_start: float, t_stop: float) -> CutoffFamily:
    """Cutoffs of the step q → q+1 with τ = τ_{q+1} and j from ⌊t_start/τ⌋ to ⌈t_stop/τ⌉."""
    tau = sched.tau_at(q + 1)
    return CutoffFamily(tau=tau, j_min=int(math.floor(t_start / tau)), j_max=int(math.ceil(t_stop / tau)))
