# persistence/checkpoint.py

import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import CheckpointError
from ..noise.stokes import ZProcess
from ..spectral.fields import FieldSeries, ScalarField, ScalarPath, SymTFField, VectorField
from ..spectral.grid import PeriodicGrid

MAGIC = b"MSQG1"
# N, components, count, k0, radius (-1: full grid), dt, seed
HEADER = struct.Struct("<qqqqqdq")

_KINDS = {b"S": ScalarField, b"V": VectorField, b"T": SymTFField}
_CODES = {cls: code for code, cls in _KINDS.items()}
PATH_CODE = b"P"
MODES_CODE = b"Z"

PathLike = Union[str, Path]


def _complex_bytes(data: np.ndarray) -> bytes:
    """Row-major little-endian float64 with (re, im) interleaved."""
    return np.ascontiguousarray(data, dtype="<c16").view("<f8").tobytes()


def _complex_from(buffer: bytes, offset: int, shape) -> Tuple[np.ndarray, int]:
    count = int(np.prod(shape)) * 2
    end = offset + 8 * count
    if end > len(buffer):
        raise CheckpointError(f"checkpoint truncated: need {end} bytes, have {len(buffer)}")
    flat = np.frombuffer(buffer, dtype="<f8", count=count, offset=offset)
    return flat.view("<c16").reshape(shape).astype(complex), end


def _read_header(buffer: bytes, expected: Optional[bytes] = None):
    if buffer[:len(MAGIC)] != MAGIC:
        raise CheckpointError("not an MSQG1 checkpoint")
    code = buffer[len(MAGIC):len(MAGIC) + 1]
    if expected is not None and code not in expected:
        raise CheckpointError(f"checkpoint kind {code!r} is not one of {expected!r}")
    start = len(MAGIC) + 1
    if len(buffer) < start + HEADER.size:
        raise CheckpointError("checkpoint header truncated")
    return code, HEADER.unpack_from(buffer, start), start + HEADER.size


def encode_series(series: FieldSeries, seed: int = 0) -> bytes:
    code = _CODES.get(series.kind)
    if code is None:
        raise CheckpointError(f"no checkpoint code for {series.kind.__name__}")
    radius = -1 if series.radius is None else series.radius
    header = HEADER.pack(series.grid.N, series.kind.components, len(series), series.k0, radius, series.dt, seed)
    return MAGIC + code + header + _complex_bytes(series.data)


def decode_series(buffer: bytes, workers: int = 1) -> Tuple[FieldSeries, int]:
    """
    Rebuild a FieldSeries and its seed from encode_series output.

    Raises:
        CheckpointError: On a wrong magic, an unknown kind or a short buffer.
    """
    code, (N, components, count, k0, radius, dt, seed), offset = _read_header(buffer, b"SVT")
    kind = _KINDS[code]
    if components != kind.components:
        raise CheckpointError(f"{kind.__name__} has {kind.components} components, header says {components}")
    grid = PeriodicGrid(N, workers)
    radius = None if radius < 0 else radius
    template = FieldSeries.zeros(kind, grid, k0, 0, dt, radius)
    data, _ = _complex_from(buffer, offset, (count,) + template.data.shape[1:])
    return FieldSeries(kind, grid, k0, dt, data, radius), seed


def encode_path(path: ScalarPath, seed: int = 0) -> bytes:
    header = HEADER.pack(0, 1, len(path), path.k0, -1, path.dt, seed)
    return MAGIC + PATH_CODE + header + np.ascontiguousarray(path.values, dtype="<f8").tobytes()


def decode_path(buffer: bytes) -> Tuple[ScalarPath, int]:
    _, (_, _, count, k0, _, dt, seed), offset = _read_header(buffer, PATH_CODE)
    end = offset + 8 * count
    if end > len(buffer):
        raise CheckpointError("path checkpoint truncated")
    values = np.frombuffer(buffer, dtype="<f8", count=count, offset=offset).astype(float)
    return ScalarPath(k0, dt, values), seed


def encode_modes(z: ZProcess, seed: int = 0) -> bytes:
    """OU mode coefficients: header, then modes (M, 2) as float64, then coefficients (steps+1, M)."""
    M = len(z.modes)
    header = HEADER.pack(z.grid.N, M, z.coeffs.shape[0], 0, -1, z.dt, seed)
    modes = np.ascontiguousarray(z.modes, dtype="<f8").tobytes()
    return MAGIC + MODES_CODE + header + modes + _complex_bytes(z.coeffs)


def decode_modes(buffer: bytes, workers: int = 1) -> Tuple[ZProcess, int]:
    _, (N, M, count, _, _, dt, seed), offset = _read_header(buffer, MODES_CODE)
    end = offset + 16 * M
    if end > len(buffer):
        raise CheckpointError("mode checkpoint truncated")
    modes = np.frombuffer(buffer, dtype="<f8", count=2 * M, offset=offset).reshape(M, 2).astype(float)
    coeffs, _ = _complex_from(buffer, end, (count, M))
    return ZProcess(PeriodicGrid(N, workers), dt, modes, coeffs), seed


class CheckpointWriter:
    """Writes and reads MSQG1 files under one directory; failures come back as (None, error)."""

    def __init__(self, directory: PathLike, seed: int = 0, logger=None):
        self.directory = Path(directory)
        self.seed = int(seed)
        self.logger = logger

    def _write(self, name: str, payload: bytes) -> Tuple[Optional[str], Optional[str]]:
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            target = self.directory / name
            target.write_bytes(payload)
            if self.logger:
                self.logger.debug(f"Checkpoint written: {target} ({len(payload)} bytes)")
            return str(target), None
        except Exception as e:
            if self.logger:
                self.logger.error(f"Checkpoint {name} failed: {e}")
            return None, str(e)

    def write_series(self, name: str, series: FieldSeries, samples: Optional[int] = None):
        """Write the last 'samples' time samples (all when None)."""
        if samples is not None and samples < len(series):
            series = series.window(series.k1 - samples, series.k1)
        return self._write(f"{name}.msqg", encode_series(series, self.seed))

    def write_path(self, name: str, path: ScalarPath):
        return self._write(f"{name}.msqg", encode_path(path, self.seed))

    def write_modes(self, name: str, z: ZProcess):
        return self._write(f"{name}.msqg", encode_modes(z, self.seed))

    @staticmethod
    def read(path: PathLike, workers: int = 1):
        """
        Decode any MSQG1 file.

        Returns:
            (object, seed) where object is a FieldSeries, ScalarPath or ZProcess.

        Raises:
            CheckpointError: If the file is not a valid checkpoint.
        """
        buffer = Path(path).read_bytes()
        code, _, _ = _read_header(buffer)
        if code == PATH_CODE:
            return decode_path(buffer)
        if code == MODES_CODE:
            return decode_modes(buffer, workers)
        if code in _KINDS:
            return decode_series(buffer, workers)
        raise CheckpointError(f"unknown checkpoint kind {code!r}")
