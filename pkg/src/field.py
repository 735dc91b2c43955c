"""
Berry random plane waves.

A realization is a finite Gaussian superposition of plane waves with
wavenumber k = 2*pi*sqrt(E),

    B(x) = M^{-1/2} sum_m [xi_m cos(k <u_m, x>) + eta_m sin(k <u_m, x>)],

on the equispaced half-circle of directions rotation_offset + m*pi/M. Every
realization solves the Helmholtz equation exactly and has unit pointwise
variance; isotropy holds in distribution through the random rotation.
"""

import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Protocol, Tuple

import numpy as np

from .errors import ConfigurationError, DomainError
from .special_functions import bessel_j_array


_UINT64_MASK = (1 << 64) - 1
_POINT_BLOCK = 1 << 21


def wavenumber(energy: float) -> float:
    """k = 2*pi*sqrt(E)."""
    return 2.0 * math.pi * math.sqrt(energy)


def derivative_scale(energy: float) -> float:
    """Standard deviation sqrt(2*pi^2*E) of each raw partial derivative."""
    return math.sqrt(2.0 * math.pi ** 2 * energy)


def default_n_waves(energy: float) -> int:
    """Default number of plane waves: max(256, ceil(8*sqrt(E)))."""
    return max(256, int(math.ceil(8.0 * math.sqrt(energy))))


def keyed_generator(seed: int, replication: int) -> np.random.Generator:
    """
    Counter-based generator keyed by (seed, replication).

    Streams for different replications never share state, so replications can
    be drawn in any order or in parallel.
    """
    if seed < 0 or replication < 0:
        raise ConfigurationError("seed and replication must be nonnegative")
    key = np.array([seed & _UINT64_MASK, replication & _UINT64_MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SeedRecord:
    """Seed and replication index that produced a realization."""
    seed: int
    replication: int


@dataclass(frozen=True)
class FieldEval:
    """Value, raw gradient and unit-variance gradient at one point."""
    value: float
    gradient: np.ndarray
    normalized_gradient: np.ndarray


class ScalarField(Protocol):
    """Anything the nodal extractor can sample."""
    energy: float

    def values(self, px: np.ndarray, py: np.ndarray) -> np.ndarray: ...

    def grid_values(self, xs: np.ndarray, ys: np.ndarray,
                    with_gradient: bool = False) -> Tuple[np.ndarray, ...]: ...


def _freeze(arr: Iterable[float]) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PlaneWaveField:
    """
    An immutable sampled realization of the Berry random wave.

    Safe to evaluate from any number of threads.
    """
    energy: float
    n_waves: int
    directions: np.ndarray
    coeff_cos: np.ndarray
    coeff_sin: np.ndarray
    rotation_offset: float = 0.0
    seed_record: Optional[SeedRecord] = None
    _unit: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        if not self.energy > 0:
            raise ConfigurationError(f"Energy must be positive, got {self.energy}")
        for name in ("directions", "coeff_cos", "coeff_sin"):
            arr = _freeze(getattr(self, name))
            if arr.shape != (self.n_waves,):
                raise ConfigurationError(f"{name} must have length {self.n_waves}")
            object.__setattr__(self, name, arr)
        unit = np.stack([np.cos(self.directions), np.sin(self.directions)], axis=1)
        unit.setflags(write=False)
        object.__setattr__(self, "_unit", unit)

    @classmethod
    def from_coefficients(cls, energy: float, coeff_cos: Iterable[float], coeff_sin: Iterable[float],
                          directions: Optional[Iterable[float]] = None,
                          rotation_offset: float = 0.0) -> "PlaneWaveField":
        """
        Build a deterministic field from explicit coefficients.

        Args:
            energy: E > 0
            coeff_cos: Cosine coefficients xi
            coeff_sin: Sine coefficients eta
            directions: Direction angles; equispaced half-circle when omitted
            rotation_offset: Offset used for the default directions

        Returns:
            PlaneWaveField with M = len(coeff_cos) (M >= 1 is allowed here)
        """
        xi = np.asarray(list(coeff_cos), dtype=float)
        eta = np.asarray(list(coeff_sin), dtype=float)
        m = xi.size
        if m < 1 or eta.size != m:
            raise ConfigurationError("Coefficient vectors must be nonempty and of equal length")
        if directions is None:
            angles = rotation_offset + math.pi * np.arange(m) / m
        else:
            angles = np.asarray(list(directions), dtype=float)
        return cls(energy=energy, n_waves=m, directions=angles, coeff_cos=xi,
                   coeff_sin=eta, rotation_offset=rotation_offset)

    @property
    def wavenumber(self) -> float:
        return wavenumber(self.energy)

    @property
    def unit_vectors(self) -> np.ndarray:
        return self._unit

    def value_and_gradient(self, px: np.ndarray, py: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Value and raw gradient at arbitrary point arrays of equal shape."""
        px = np.asarray(px, dtype=float)
        py = np.asarray(py, dtype=float)
        shape = np.broadcast(px, py).shape
        fx = np.broadcast_to(px, shape).ravel()
        fy = np.broadcast_to(py, shape).ravel()
        k = self.wavenumber
        scale = 1.0 / math.sqrt(self.n_waves)
        u1, u2 = self._unit[:, 0], self._unit[:, 1]
        val = np.empty(fx.size)
        gx = np.empty(fx.size)
        gy = np.empty(fx.size)
        step = max(1, _POINT_BLOCK // self.n_waves)
        for s in range(0, fx.size, step):
            phase = k * (np.outer(fx[s:s + step], u1) + np.outer(fy[s:s + step], u2))
            c, sn = np.cos(phase), np.sin(phase)
            val[s:s + step] = scale * (c @ self.coeff_cos + sn @ self.coeff_sin)
            slope = -sn * self.coeff_cos + c * self.coeff_sin
            gx[s:s + step] = k * scale * (slope @ u1)
            gy[s:s + step] = k * scale * (slope @ u2)
        return val.reshape(shape), gx.reshape(shape), gy.reshape(shape)

    def values(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        """Field values at point arrays."""
        return self.value_and_gradient(px, py)[0]

    def evaluate(self, x: Tuple[float, float]) -> FieldEval:
        """Evaluate value and gradient at a single point in O(M)."""
        v, gx, gy = self.value_and_gradient(np.array([x[0]]), np.array([x[1]]))
        grad = np.array([gx[0], gy[0]])
        return FieldEval(value=float(v[0]), gradient=grad,
                         normalized_gradient=grad / derivative_scale(self.energy))

    def grid_values(self, xs: np.ndarray, ys: np.ndarray,
                    with_gradient: bool = False) -> Tuple[np.ndarray, ...]:
        """
        Evaluate on the tensor grid xs x ys using separable products.

        Args:
            xs: Abscissae, length nx
            ys: Ordinates, length ny
            with_gradient: Also return raw partial derivatives

        Returns:
            (values,) or (values, dB/dx1, dB/dx2), each of shape (nx, ny)
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        k = self.wavenumber
        scale = 1.0 / math.sqrt(self.n_waves)
        u1, u2 = self._unit[:, 0], self._unit[:, 1]
        ax = k * np.outer(u1, xs)
        ay = k * np.outer(u2, ys)
        cx, sx = np.cos(ax), np.sin(ax)
        cy, sy = np.cos(ay), np.sin(ay)

        def combine(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
            # sum_m alpha_m sin(a+b) + beta_m cos(a+b)
            first = alpha[:, None] * sx + beta[:, None] * cx
            second = alpha[:, None] * cx - beta[:, None] * sx
            return first.T @ cy + second.T @ sy

        xi, eta = self.coeff_cos, self.coeff_sin
        values = scale * combine(eta, xi)
        if not with_gradient:
            return (values,)
        gx = k * scale * combine(-xi * u1, eta * u1)
        gy = k * scale * combine(-xi * u2, eta * u2)
        return values, gx, gy


def sample_field(energy: float, n_waves: Optional[int], seed: int, replication: int) -> PlaneWaveField:
    """
    Draw a realization from the stream keyed by (seed, replication).

    Draw order: rotation offset, then the M cosine coefficients, then the M
    sine coefficients. The key does not include E: at equal M, fields at
    different energies share their coefficients and offset, so cross-energy
    comparisons within a replication are correlated.

    Args:
        energy: E > 0
        n_waves: M >= 2, or None for default_n_waves(E)
        seed: 64-bit seed
        replication: Replication index

    Returns:
        PlaneWaveField

    Raises:
        ConfigurationError: If E <= 0 or M < 2
    """
    if not energy > 0:
        raise ConfigurationError(f"Energy must be positive, got {energy}")
    m = default_n_waves(energy) if n_waves is None else int(n_waves)
    if m < 2:
        raise ConfigurationError(f"Need at least 2 plane waves, got {m}")
    gen = keyed_generator(seed, replication)
    offset = float(gen.uniform(0.0, math.pi))
    xi = gen.standard_normal(m)
    eta = gen.standard_normal(m)
    directions = offset + math.pi * np.arange(m) / m
    return PlaneWaveField(energy=energy, n_waves=m, directions=directions, coeff_cos=xi,
                          coeff_sin=eta, rotation_offset=offset,
                          seed_record=SeedRecord(seed=seed, replication=replication))


def eval_field(field: PlaneWaveField, x: Tuple[float, float]) -> FieldEval:
    """Evaluate a realization at a point."""
    return field.evaluate(x)


def evaluate_grid(field: ScalarField, xs: np.ndarray, ys: np.ndarray,
                  with_gradient: bool = False) -> Tuple[np.ndarray, ...]:
    """Tensor-grid evaluation; see PlaneWaveField.grid_values."""
    return field.grid_values(xs, ys, with_gradient=with_gradient)


def covariance_kernel(energy: float, z) -> float:
    """Target covariance J0(2*pi*sqrt(E)*|z|)."""
    if not energy > 0:
        raise DomainError(f"Energy must be positive, got {energy}")
    dist = float(np.hypot(*np.asarray(z, dtype=float)))
    return float(bessel_j_array(0, wavenumber(energy) * dist))


def conditional_kernel(energy: float, n_waves: int, offsets: np.ndarray, lags: np.ndarray) -> np.ndarray:
    """
    Covariance of B(0) and B(r e_1) given the rotation offset.

    Returns:
        Array of shape (len(offsets), len(lags))
    """
    k = wavenumber(energy)
    base = math.pi * np.arange(n_waves) / n_waves
    out = np.empty((len(offsets), len(lags)))
    for i, offset in enumerate(offsets):
        proj = np.cos(offset + base)
        out[i] = np.cos(k * np.outer(lags, proj)).mean(axis=1)
    return out


def direction_kernel_bias(energy: float, n_waves: Optional[int] = None,
                          lags: Optional[np.ndarray] = None, n_offsets: int = 128) -> float:
    """
    Bias budget of the finite direction grid.

    Mean absolute deviation, over a uniform rotation offset, between the
    conditional kernel and J0, maximised over lags with k*r <= M/2.
    """
    m = default_n_waves(energy) if n_waves is None else n_waves
    k = wavenumber(energy)
    if lags is None:
        lags = np.linspace(0.0, min(math.sqrt(2.0), 0.5 * m / k), 200)
    lags = np.asarray(lags, dtype=float)
    lags = lags[k * lags <= 0.5 * m]
    offsets = (np.arange(n_offsets) + 0.5) * math.pi / n_offsets / m
    cond = conditional_kernel(energy, m, offsets, lags)
    target = bessel_j_array(0, k * lags)
    return float(np.max(np.mean(np.abs(cond - target[None, :]), axis=0)))
