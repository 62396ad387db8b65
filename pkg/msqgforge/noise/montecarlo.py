# noise/montecarlo.py

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from ..spectral.fields import ScalarPath
from .stopping import stopping_time_mult


@dataclass
class SurvivalRow:
    L: float
    probability: float
    stderr: float
    paths: int

    def to_dict(self) -> dict:
        return {"L": self.L, "probability": self.probability, "stderr": self.stderr, "paths": self.paths}


@dataclass
class SurvivalTable:
    """Empirical P(T_L >= T) per level L."""
    horizon: float
    seed: int
    rows: List[SurvivalRow] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        """Whether the estimate is non-decreasing in L."""
        probs = [r.probability for r in sorted(self.rows, key=lambda r: r.L)]
        return all(b >= a for a, b in zip(probs, probs[1:]))

    def to_dict(self) -> dict:
        return {"horizon": self.horizon, "seed": self.seed, "monotone": self.monotone,
                "rows": [r.to_dict() for r in self.rows], "anchor": "stopping.survival"}


def _survives(path_index: int, levels: Sequence[float], T: float, dt: float, delta: float, seed: int,
              amplitude: float) -> List[bool]:
    rng = np.random.default_rng([seed, path_index])
    steps = int(math.ceil(T / dt - 1e-9))
    values = np.zeros(steps + 1)
    values[1:] = amplitude * math.sqrt(dt) * np.cumsum(rng.standard_normal(steps))
    path = ScalarPath(0, dt, values)
    out = []
    for L in levels:
        if T > L:
            out.append(False)
            continue
        out.append(stopping_time_mult(path, L, delta).value >= T)
    return out


def survival_probability(levels: Sequence[float], T: float, paths: int, dt: float, delta: float, seed: int,
                         workers: int = 1, amplitude: float = 1.0, logger=None) -> SurvivalTable:
    """
    Estimate P(T_L >= T) for each L over 'paths' independent Brownian paths.

    Path i draws from default_rng([seed, i]); results are gathered in path
    order so the table does not depend on 'workers'. The standard error is
    √(p(1−p)/K).
    """
    levels = [float(L) for L in levels]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda i: _survives(i, levels, T, dt, delta, seed, amplitude), range(paths)))
    table = SurvivalTable(horizon=T, seed=seed)
    for col, L in enumerate(levels):
        hits = sum(1 for row in results if row[col])
        p = hits / paths if paths else 0.0
        stderr = math.sqrt(p * (1 - p) / paths) if paths else 0.0
        table.rows.append(SurvivalRow(L=L, probability=p, stderr=stderr, paths=paths))
    if logger:
        summary = ", ".join(f"L={r.L:g}: {r.probability:.3f}±{r.stderr:.3f}" for r in table.rows)
        logger.info(f"Survival P(T_L >= {T:g}) over {paths} paths: {summary}")
    return table
