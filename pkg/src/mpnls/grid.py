"""Truncated-torus discretization of Rⁿ with unitary discrete Fourier transforms.

Rⁿ is approximated by the box [-R, R)ⁿ with N equispaced points per axis and
frequency lattice ξ = (π/R)·j, j ∈ [-N/2, N/2).  Transforms are normalized so
the discrete Plancherel identity holds exactly:

    h·Σₓ |u(x)|² = w·Σ_ξ |û(ξ)|²,   h = (2R/N)ⁿ,  w = (π/R)ⁿ,

i.e. û(ξ) = (2π)^{-n/2}·h·Σₓ u(x)e^{-iξ·x}, the symmetric continuum
convention sampled on the grid.  With this choice discrete norms approximate
their Rⁿ integrals uniformly in N and R.  Powers of two for N are fastest but
any even N ≥ 4 works.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import (
    BadDimensionError,
    FileFormatError,
    GridMismatchError,
    ModeNotOnLatticeError,
    NonFiniteInputError,
    NonpositiveRError,
    OddNError,
)

FIELD_FILE_MAGIC = b"MPNLSFLD"
FIELD_FILE_VERSION = 1


class SpectralGrid:
    """Uniform periodic grid on [-R, R)ⁿ together with its frequency lattice."""

    __slots__ = ("n", "N", "R", "h", "w", "shape", "x_axes", "freq_axes", "_phase")

    def __init__(self, n: int, N: int, R: float):
        self.n = n
        self.N = N
        self.R = R
        self.h = (2.0 * R / N) ** n
        self.w = (np.pi / R) ** n
        self.shape = (N,) * n
        step = 2.0 * R / N
        self.x_axes = [-R + step * np.arange(N) for _ in range(n)]
        j = np.arange(-N // 2, N // 2)
        self.freq_axes = [(np.pi / R) * j for _ in range(n)]
        # (-1)^j per axis: phase between the DFT and the ξ·x convention on [-R, R)
        axis_phase = (-1.0) ** j
        phase = axis_phase
        for _ in range(n - 1):
            phase = np.multiply.outer(phase, axis_phase)
        phase.flags.writeable = False
        self._phase = phase

    def __eq__(self, other):
        if not isinstance(other, SpectralGrid):
            return NotImplemented
        return (self.n, self.N, self.R) == (other.n, other.N, other.R)

    def __hash__(self):
        return hash((self.n, self.N, self.R))

    def __repr__(self):
        return f"SpectralGrid(n={self.n}, N={self.N}, R={self.R})"

    def x_mesh(self):
        """Sparse meshgrid of the position axes (broadcastable arrays)."""
        return np.meshgrid(*self.x_axes, indexing="ij", sparse=True)

    def freq_mesh(self):
        """Sparse meshgrid of the frequency axes (broadcastable arrays)."""
        return np.meshgrid(*self.freq_axes, indexing="ij", sparse=True)

    def radial_freq_sq(self) -> np.ndarray:
        """|ξ|² on the full lattice."""
        mesh = self.freq_mesh()
        out = np.zeros(self.shape)
        for ax in mesh:
            out = out + ax**2
        return out


class Field:
    """Complex samples on a grid; values are finite and read-only."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: SpectralGrid, values, *, _trusted: bool = False):
        if _trusted:
            self.grid = grid
            self.values = values
            return
        arr = np.array(values, dtype=np.complex128, copy=True)
        if arr.shape != grid.shape:
            raise GridMismatchError(f"values shape {arr.shape} does not match grid {grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInputError("field samples contain NaN or Inf")
        arr.flags.writeable = False
        self.grid = grid
        self.values = arr

    @classmethod
    def _wrap(cls, grid: SpectralGrid, arr: np.ndarray) -> "Field":
        """Internal fast path: wrap an array we own without copy/validation."""
        if arr.flags.writeable:
            arr.flags.writeable = False
        return cls(grid, arr, _trusted=True)

    def __add__(self, other):
        _check_same_grid(self, other)
        return Field._wrap(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return Field._wrap(self.grid, self.values - other.values)

    def __mul__(self, c):
        return Field._wrap(self.grid, self.values * complex(c))

    __rmul__ = __mul__

    def __repr__(self):
        return f"Field(grid={self.grid!r})"


class Trajectory:
    """Uniformly time-indexed sequence of fields on [t0, T]."""

    __slots__ = ("grid", "t0", "T", "nt", "values")

    def __init__(self, grid: SpectralGrid, t0: float, T: float, values, *, _trusted: bool = False):
        if _trusted:
            self.grid = grid
            self.t0 = t0
            self.T = T
            self.nt = values.shape[0] - 1
            self.values = values
            return
        arr = np.array(values, dtype=np.complex128, copy=True)
        if arr.ndim != 1 + grid.n or arr.shape[1:] != grid.shape or arr.shape[0] < 2:
            raise GridMismatchError(
                f"trajectory shape {arr.shape} does not match grid {grid.shape}"
            )
        if not (T > t0):
            raise GridMismatchError("trajectory needs T > t0")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInputError("trajectory samples contain NaN or Inf")
        arr.flags.writeable = False
        self.grid = grid
        self.t0 = t0
        self.T = T
        self.nt = arr.shape[0] - 1
        self.values = arr

    @classmethod
    def _wrap(cls, grid, t0, T, arr) -> "Trajectory":
        if arr.flags.writeable:
            arr.flags.writeable = False
        return cls(grid, t0, T, arr, _trusted=True)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.T, self.nt + 1)

    @property
    def dt(self) -> float:
        return (self.T - self.t0) / self.nt

    def frame(self, m: int) -> Field:
        return Field._wrap(self.grid, self.values[m])

    def __sub__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        if self.grid != other.grid or self.nt != other.nt or (self.t0, self.T) != (other.t0, other.T):
            raise GridMismatchError("trajectories live on different grids or time axes")
        return Trajectory._wrap(self.grid, self.t0, self.T, self.values - other.values)

    def __repr__(self):
        return f"Trajectory(grid={self.grid!r}, t0={self.t0}, T={self.T}, nt={self.nt})"


def _check_same_grid(a: Field, b: Field):
    if a.grid != b.grid:
        raise GridMismatchError("fields live on different grids")


def build_grid(n: int, N: int, R: float) -> SpectralGrid:
    """Construct a grid; n ∈ {1,2,3}, N even ≥ 4, R > 0."""
    if not isinstance(n, (int, np.integer)) or n not in (1, 2, 3):
        raise BadDimensionError(f"dimension must be 1, 2 or 3, got {n!r}")
    if not isinstance(N, (int, np.integer)) or N < 4 or N % 2 != 0:
        raise OddNError(f"points per axis must be even and >= 4, got {N!r}")
    if not (float(R) > 0.0) or not np.isfinite(R):
        raise NonpositiveRError(f"half-width must be positive, got {R!r}")
    return SpectralGrid(int(n), int(N), float(R))


# --- transforms --------------------------------------------------------------


def forward_transform(field: Field) -> Field:
    """Forward DFT to the frequency lattice, Plancherel-unitary normalization."""
    g = field.grid
    if not np.all(np.isfinite(field.values)):
        raise NonFiniteInputError("field samples contain NaN or Inf")
    coef = (2.0 * np.pi) ** (-g.n / 2.0) * g.h
    spec = coef * g._phase * np.fft.fftshift(np.fft.fftn(field.values))
    return Field._wrap(g, spec)


def inverse_transform(field: Field) -> Field:
    """Inverse DFT from the frequency lattice; exact inverse of forward_transform."""
    g = field.grid
    if not np.all(np.isfinite(field.values)):
        raise NonFiniteInputError("spectral samples contain NaN or Inf")
    coef = (2.0 * np.pi) ** (-g.n / 2.0) * g.w * g.N**g.n
    phys = coef * np.fft.ifftn(np.fft.ifftshift(g._phase * field.values))
    return Field._wrap(g, phys)


# --- initial-data profiles ---------------------------------------------------


def sample_profile(grid: SpectralGrid, profile: dict) -> Field:
    """Sample a named profile on the grid.

    Supported kinds::

        {"kind": "gaussian", "amplitude": A, "width": w, "center": [c...]}
        {"kind": "plane_wave", "amplitude": A, "mode": [j...]}   # ξ = (π/R)·j
        {"kind": "from_file", "path": "..."}                     # binary field file

    Scalar amplitude may be given as a number or [re, im] pair.
    """
    if not isinstance(profile, dict) or "kind" not in profile:
        raise ValueError("profile must be a dict with a 'kind' key")
    kind = profile["kind"]
    if kind == "gaussian":
        amp = _as_complex(profile.get("amplitude", 1.0))
        width = float(profile.get("width", 1.0))
        if width <= 0.0:
            raise ValueError("gaussian width must be positive")
        center = _as_vector(profile.get("center", [0.0] * grid.n), grid.n, "center")
        mesh = grid.x_mesh()
        r2 = np.zeros(grid.shape)
        for ax, c in zip(mesh, center):
            r2 = r2 + (ax - c) ** 2
        return Field(grid, amp * np.exp(-r2 / (2.0 * width**2)))
    if kind == "plane_wave":
        amp = _as_complex(profile.get("amplitude", 1.0))
        mode = profile.get("mode", [0] * grid.n)
        mode = np.atleast_1d(np.asarray(mode, dtype=float))
        if mode.shape != (grid.n,):
            raise ValueError(f"mode must have {grid.n} entries")
        if np.any(mode != np.round(mode)):
            raise ModeNotOnLatticeError(f"mode {mode.tolist()} has non-integer entries")
        if np.any(np.abs(mode) > grid.N // 2):
            raise ModeNotOnLatticeError(f"mode {mode.tolist()} exceeds the lattice half-width")
        mesh = grid.x_mesh()
        phase = np.zeros(grid.shape)
        for ax, j in zip(mesh, mode):
            phase = phase + (np.pi / grid.R) * j * ax
        return Field(grid, amp * np.exp(1j * phase))
    if kind == "from_file":
        return read_field_file(profile["path"], grid=grid)
    raise ValueError(f"unknown profile kind {kind!r}")


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _as_vector(v, n: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.shape != (n,):
        raise ValueError(f"{name} must have {n} entries")
    return arr


def random_band_limited(grid: SpectralGrid, band: int, rng: np.random.Generator,
                        amplitude: float = 1.0) -> Field:
    """Random smooth field: unit-variance complex coefficients on modes |j|∞ ≤ band.

    The realized function Σ c_j e^{i(π/R)j·x} is grid-independent, so the same
    seed produces the same function on refined grids (used by the resolution
    stability checks).
    """
    if band >= grid.N // 2:
        raise ModeNotOnLatticeError(f"band {band} does not fit on an N={grid.N} grid")
    width = 2 * band + 1
    coeffs = rng.standard_normal((width,) * grid.n) + 1j * rng.standard_normal((width,) * grid.n)
    spec = np.zeros(grid.shape, dtype=np.complex128)
    center = grid.N // 2  # index of j = 0 in the shifted lattice
    sl = tuple(slice(center - band, center + band + 1) for _ in range(grid.n))
    # one unit of e^{ikx} carries spectral coefficient (2π)^{-n/2}(2R)^n
    unit = (2.0 * np.pi) ** (-grid.n / 2.0) * (2.0 * grid.R) ** grid.n
    spec[sl] = amplitude * unit * coeffs
    return inverse_transform(Field._wrap(grid, spec))


# --- binary field files ------------------------------------------------------

_HEADER = struct.Struct("<8sIII d")  # magic, version, n, N, R


def write_field_file(field: Field, path) -> None:
    """Write a field as: magic 'MPNLSFLD', u32 version=1, u32 n, u32 N, f64 R,
    then Nⁿ little-endian (f64 re, f64 im) pairs in row-major order."""
    g = field.grid
    header = _HEADER.pack(FIELD_FILE_MAGIC, FIELD_FILE_VERSION, g.n, g.N, g.R)
    payload = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_field_file(path, grid: SpectralGrid | None = None) -> Field:
    """Read a binary field file; if a grid is given, the header must match it."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise FileFormatError(f"{path}: truncated header")
    magic, version, n, N, R = _HEADER.unpack_from(raw)
    if magic != FIELD_FILE_MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}")
    if version != FIELD_FILE_VERSION:
        raise FileFormatError(f"{path}: unsupported version {version}")
    if grid is None:
        grid = build_grid(n, N, R)
    elif (grid.n, grid.N) != (n, N) or abs(grid.R - R) > 1e-12 * max(1.0, abs(grid.R)):
        raise FileFormatError(
            f"{path}: file grid (n={n}, N={N}, R={R}) does not match target "
            f"(n={grid.n}, N={grid.N}, R={grid.R})"
        )
    expected = _HEADER.size + 16 * N**n
    if len(raw) != expected:
        raise FileFormatError(f"{path}: expected {expected} bytes, got {len(raw)}")
    values = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape((N,) * n)
    return Field(grid, values)
