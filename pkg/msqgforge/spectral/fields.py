# spectral/fields.py

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Type

import numpy as np

from .grid import PeriodicGrid


class Field:
    """
    Periodic field held by its Fourier coefficients on a PeriodicGrid.

    Subclasses fix the number of components. Real fields keep Hermitian
    coefficients; complex fields (phases, single waves) are allowed and
    simply carry non-Hermitian coefficients.
    """
    components = 1

    def __init__(self, grid: PeriodicGrid, coeffs: np.ndarray):
        shape = self.shape_for(grid)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != shape:
            raise ValueError(f"{type(self).__name__} expects coefficients of shape {shape}, got {coeffs.shape}")
        self.grid = grid
        self.coeffs = coeffs

    @classmethod
    def shape_for(cls, grid: PeriodicGrid):
        if cls.components == 1:
            return (grid.N, grid.N)
        return (cls.components, grid.N, grid.N)

    @classmethod
    def zeros(cls, grid: PeriodicGrid):
        return cls(grid, np.zeros(cls.shape_for(grid), dtype=complex))

    @classmethod
    def from_physical(cls, grid: PeriodicGrid, values: np.ndarray):
        return cls(grid, grid.forward(np.asarray(values)))

    def values(self) -> np.ndarray:
        """Complex physical samples."""
        return self.grid.inverse(self.coeffs)

    def physical(self) -> np.ndarray:
        """Real part of the physical samples."""
        return self.values().real

    def imaginary_residue(self) -> float:
        return float(np.max(np.abs(self.values().imag))) if self.coeffs.size else 0.0

    def real_part(self):
        """Hermitian-symmetrized copy; equals the field when it is already real."""
        return type(self).from_physical(self.grid, self.physical())

    def mean(self):
        return self.coeffs[..., 0, 0]

    def _new(self, coeffs):
        return type(self)(self.grid, coeffs)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"Cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.grid != self.grid:
            raise ValueError("Fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return self._new(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return self._new(self.coeffs - other.coeffs)

    def __neg__(self):
        return self._new(-self.coeffs)

    def __mul__(self, scalar):
        return self._new(self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._new(self.coeffs / scalar)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(N={self.grid.N})"


class ScalarField(Field):
    components = 1


class VectorField(Field):
    components = 2

    def component(self, i: int) -> ScalarField:
        return ScalarField(self.grid, self.coeffs[i])


class SymTFField(Field):
    """Symmetric trace-free 2x2 matrix field stored as (A¹¹, A¹²); A²² = −A¹¹."""
    components = 2

    def entries(self):
        """Physical (A¹¹, A¹², A²²) arrays."""
        a11, a12 = self.physical()
        return a11, a12, -a11


@dataclass
class ScalarPath:
    """Scalar function sampled on the global time grid t_k = k·dt, k = k0 .. k0+len-1."""
    k0: int
    dt: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def k1(self) -> int:
        return self.k0 + len(self.values)

    @property
    def data(self) -> np.ndarray:
        return self.values

    def times(self) -> np.ndarray:
        return (self.k0 + np.arange(len(self.values))) * self.dt

    def at(self, k: int) -> float:
        if not self.k0 <= k < self.k1:
            raise IndexError(f"time index {k} outside [{self.k0}, {self.k1})")
        return float(self.values[k - self.k0])

    def with_data(self, k0: int, data: np.ndarray) -> "ScalarPath":
        return ScalarPath(k0, self.dt, data)


class FieldSeries:
    """
    Time-sampled field on the global grid t_k = k·dt for k0 <= k < k0 + len.

    Coefficients are stored in the compact box |m_i| <= radius (or the full
    grid when radius is None) with layout (time, components..., K, K).
    """

    def __init__(self, kind: Type[Field], grid: PeriodicGrid, k0: int, dt: float,
                 data: np.ndarray, radius: Optional[int] = None):
        self.kind = kind
        self.grid = grid
        self.k0 = int(k0)
        self.dt = float(dt)
        self.radius = None if radius is None else int(min(int(np.floor(radius)), grid.N // 2 - 1))
        self.data = np.asarray(data, dtype=complex)
        expected = self._box_shape()
        if self.data.shape[1:] != expected:
            raise ValueError(f"Series data of shape {self.data.shape[1:]} does not match {expected}")

    def _box_shape(self):
        K = self.grid.N if self.radius is None else 2 * self.radius + 1
        if self.kind.components == 1:
            return (K, K)
        return (self.kind.components, K, K)

    @classmethod
    def from_fields(cls, fields: Sequence[Field], k0: int, dt: float, radius: Optional[float] = None,
                    kind: Optional[Type[Field]] = None, grid: Optional[PeriodicGrid] = None) -> "FieldSeries":
        fields = list(fields)
        if kind is None or grid is None:
            if not fields:
                raise ValueError("kind and grid are required for an empty series")
            kind, grid = type(fields[0]), fields[0].grid
        series = cls(kind, grid, k0, dt, np.zeros((0,) + cls._shape(kind, grid, radius), dtype=complex), radius)
        if fields:
            series.data = np.stack([series.compress(f.coeffs) for f in fields])
        return series

    @staticmethod
    def _shape(kind, grid, radius):
        if radius is None:
            K = grid.N
        else:
            K = 2 * int(min(int(np.floor(radius)), grid.N // 2 - 1)) + 1
        return (K, K) if kind.components == 1 else (kind.components, K, K)

    @classmethod
    def zeros(cls, kind: Type[Field], grid: PeriodicGrid, k0: int, count: int, dt: float,
              radius: Optional[float] = None) -> "FieldSeries":
        shape = (count,) + cls._shape(kind, grid, radius)
        return cls(kind, grid, k0, dt, np.zeros(shape, dtype=complex), radius)

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def k1(self) -> int:
        return self.k0 + len(self)

    def indices(self) -> range:
        return range(self.k0, self.k1)

    def times(self) -> np.ndarray:
        return (self.k0 + np.arange(len(self))) * self.dt

    def contains(self, k: int) -> bool:
        return self.k0 <= k < self.k1

    def compress(self, coeffs: np.ndarray) -> np.ndarray:
        if self.radius is None:
            return np.array(coeffs, dtype=complex)
        idx = self.grid.box_indices(self.radius)
        return coeffs[..., idx[:, None], idx[None, :]]

    def expand(self, box: np.ndarray) -> np.ndarray:
        if self.radius is None:
            return np.array(box, dtype=complex)
        idx = self.grid.box_indices(self.radius)
        full = np.zeros(box.shape[:-2] + (self.grid.N, self.grid.N), dtype=complex)
        full[..., idx[:, None], idx[None, :]] = box
        return full

    def coeffs_at(self, k: int) -> np.ndarray:
        if not self.contains(k):
            raise IndexError(f"time index {k} outside [{self.k0}, {self.k1})")
        return self.expand(self.data[k - self.k0])

    def field(self, k: int) -> Field:
        return self.kind(self.grid, self.coeffs_at(k))

    def fields(self) -> Iterable[Field]:
        for k in self.indices():
            yield self.field(k)

    def with_data(self, k0: int, data: np.ndarray) -> "FieldSeries":
        return FieldSeries(self.kind, self.grid, k0, self.dt, data, self.radius)

    def window(self, k_start: int, k_stop: int) -> "FieldSeries":
        """Sub-series on [k_start, k_stop)."""
        k_start, k_stop = max(k_start, self.k0), min(k_stop, self.k1)
        return self.with_data(k_start, self.data[k_start - self.k0:k_stop - self.k0])

    def set(self, k: int, field: Field) -> None:
        self.data[k - self.k0] = self.compress(field.coeffs)

    def rebox(self, radius: Optional[float]) -> "FieldSeries":
        """Same samples stored with a different box radius (truncating if smaller)."""
        out = FieldSeries.zeros(self.kind, self.grid, self.k0, len(self), self.dt, radius)
        for i in range(len(self)):
            out.data[i] = out.compress(self.expand(self.data[i]))
        return out

    def __repr__(self) -> str:
        return f"FieldSeries({self.kind.__name__}, k=[{self.k0}, {self.k1}), radius={self.radius})"
