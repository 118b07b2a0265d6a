"""Discretized function spaces on a symmetric energy interval.

The model truncates the energy line to ``(-sigma_max, sigma_max)`` and samples
it on ``n_sigma`` bin centers offset by half a bin, so no bin sits at zero
energy.  Three spaces share this grid:

* ``FULL_LINE`` -- amplitudes are samples on all energy bins,
* ``HALF_LINE_POS`` -- samples on the positive-energy bins only,
* ``HARDY_PLUS`` -- the discrete positive Hardy subspace, stored in its
  time-lattice coordinates (see :mod:`timearrow.hardy`).

All three use the same rectangle-rule quadrature weight ``delta_sigma``; the
Hardy coordinates are scaled so that this single weight is exact for every
tag.  A fiber dimension ``k_dim`` models vector-valued amplitudes; fibers are
stored interleaved, i.e. a state is the C-order flattening of an
``(n_bins, k_dim)`` array.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Space",
    "GridSpec",
    "StateVector",
    "LinOp",
    "SpaceMismatchError",
    "make_grid",
    "make_state",
    "zero_state",
    "inner",
    "norm",
    "project_halfline",
    "embed",
    "restrict",
    "identity_op",
]

# Relative Frobenius tolerance for the declared-Hermitian check on LinOp.
_HERMITIAN_RTOL = 1e-12


class Space(Enum):
    """Tag naming which discretized space a state or operator leg lives in."""

    FULL_LINE = "full_line"
    HALF_LINE_POS = "half_line_pos"
    HARDY_PLUS = "hardy_plus"


class SpaceMismatchError(ValueError):
    """Raised when an operation would silently mix space tags or grids."""


@dataclass(frozen=True)
class GridSpec:
    """Shared discretization of the energy interval and its dual time lattice.

    Parameters
    ----------
    n_sigma : int
        Number of energy bins; a power of two, at least 8.
    sigma_max : float
        Half-width of the energy interval.
    k_dim : int
        Fiber (auxiliary Hilbert space) dimension.
    delta_sigma : float
        Energy bin width, ``2 * sigma_max / n_sigma``.
    t_window : float
        Total width of the dual time lattice, ``2 * pi / delta_sigma``.
    delta_tau : float
        Time bin width, ``t_window / n_sigma``.

    Notes
    -----
    Energy bin centers are ``sigma_j = (j + 1/2 - n_sigma/2) * delta_sigma``
    and time bin centers are ``tau_k = (k + 1/2 - n_sigma/2) * delta_tau``;
    both lattices avoid the origin, so the positive half of each is exactly
    half the bins.
    """

    n_sigma: int
    sigma_max: float
    k_dim: int
    delta_sigma: float
    t_window: float
    delta_tau: float

    def sigma(self) -> np.ndarray:
        """Energy bin centers over the full interval."""
        j = np.arange(self.n_sigma)
        return (j + 0.5 - self.n_sigma / 2) * self.delta_sigma

    def sigma_pos(self) -> np.ndarray:
        """Energy bin centers restricted to the positive half-line."""
        return self.sigma()[self.n_sigma // 2 :]

    def tau(self) -> np.ndarray:
        """Time bin centers over the full window ``(-t_window/2, t_window/2)``."""
        k = np.arange(self.n_sigma)
        return (k + 0.5 - self.n_sigma / 2) * self.delta_tau

    def tau_pos(self) -> np.ndarray:
        """Time bin centers on the positive half of the window."""
        return self.tau()[self.n_sigma // 2 :]

    def n_half(self) -> int:
        return self.n_sigma // 2

    def dim(self, space: Space) -> int:
        """Flat amplitude length for a state tagged ``space`` on this grid."""
        bins = self.n_sigma if space is Space.FULL_LINE else self.n_sigma // 2
        return bins * self.k_dim


def make_grid(n_sigma: int, sigma_max: float, k_dim: int = 1) -> GridSpec:
    """Build a :class:`GridSpec`, validating the discretization parameters.

    Parameters
    ----------
    n_sigma : int
        Must be a power of two and at least 8.
    sigma_max : float
        Must be positive.
    k_dim : int
        Must be at least 1.
    """
    if n_sigma < 8 or (n_sigma & (n_sigma - 1)) != 0:
        raise ValueError(f"n_sigma must be a power of two >= 8, got {n_sigma}")
    if not (sigma_max > 0):
        raise ValueError(f"sigma_max must be positive, got {sigma_max}")
    if k_dim < 1:
        raise ValueError(f"k_dim must be >= 1, got {k_dim}")
    delta_sigma = 2.0 * sigma_max / n_sigma
    t_window = 2.0 * np.pi / delta_sigma
    delta_tau = t_window / n_sigma
    return GridSpec(
        n_sigma=n_sigma,
        sigma_max=float(sigma_max),
        k_dim=k_dim,
        delta_sigma=delta_sigma,
        t_window=t_window,
        delta_tau=delta_tau,
    )


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    """Immutable amplitude vector tagged with its grid and space.

    ``amplitudes`` has length ``grid.dim(space)``.  The squared norm is
    ``sum(|amplitudes|^2) * grid.delta_sigma`` for every tag.
    """

    grid: GridSpec
    space: Space
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _readonly(self.amplitudes))
        expected = self.grid.dim(self.space)
        if self.amplitudes.shape != (expected,):
            raise ValueError(
                f"amplitude length {self.amplitudes.shape} does not match "
                f"{self.space.value} on this grid (expected ({expected},))"
            )

    def norm(self) -> float:
        return float(
            np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.delta_sigma)
        )

    def fibered(self) -> np.ndarray:
        """View of the amplitudes as an ``(n_bins, k_dim)`` array."""
        return self.amplitudes.reshape(-1, self.grid.k_dim)

    def _check_compatible(self, other: "StateVector") -> None:
        if self.grid != other.grid or self.space is not other.space:
            raise SpaceMismatchError(
                f"cannot combine {self.space.value} with {other.space.value} "
                f"or states from different grids"
            )

    def __add__(self, other: "StateVector") -> "StateVector":
        self._check_compatible(other)
        return StateVector(self.grid, self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        self._check_compatible(other)
        return StateVector(self.grid, self.space, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar: complex) -> "StateVector":
        return StateVector(self.grid, self.space, self.amplitudes * scalar)

    __rmul__ = __mul__


def make_state(grid: GridSpec, space: Space, amplitudes: np.ndarray) -> StateVector:
    """Construct a :class:`StateVector` (convenience wrapper)."""
    return StateVector(grid=grid, space=space, amplitudes=np.asarray(amplitudes))


def zero_state(grid: GridSpec, space: Space) -> StateVector:
    return StateVector(grid, space, np.zeros(grid.dim(space), dtype=np.complex128))


def inner(f: StateVector, g: StateVector) -> complex:
    """Quadrature inner product, conjugate-linear in the first argument."""
    f._check_compatible(g)
    return complex(np.vdot(f.amplitudes, g.amplitudes) * f.grid.delta_sigma)


def norm(f: StateVector) -> float:
    return f.norm()


def project_halfline(f: StateVector, side: str) -> StateVector:
    """Sharp spectral cut: zero all bins on the opposite energy half-line.

    Parameters
    ----------
    f : StateVector
        Must be tagged ``FULL_LINE``.
    side : {"pos", "neg"}
        Which half-line survives.
    """
    if f.space is not Space.FULL_LINE:
        raise SpaceMismatchError("project_halfline acts on FULL_LINE states")
    if side not in ("pos", "neg"):
        raise ValueError(f"side must be 'pos' or 'neg', got {side!r}")
    a = f.fibered().copy()
    half = f.grid.n_sigma // 2
    if side == "pos":
        a[:half, :] = 0.0
    else:
        a[half:, :] = 0.0
    return StateVector(f.grid, Space.FULL_LINE, a.reshape(-1))


def embed(psi: StateVector) -> StateVector:
    """Isometric inclusion of the positive half-line into the full line."""
    if psi.space is not Space.HALF_LINE_POS:
        raise SpaceMismatchError("embed acts on HALF_LINE_POS states")
    g = psi.grid
    a = np.zeros((g.n_sigma, g.k_dim), dtype=np.complex128)
    a[g.n_sigma // 2 :, :] = psi.fibered()
    return StateVector(g, Space.FULL_LINE, a.reshape(-1))


def restrict(f: StateVector) -> StateVector:
    """Adjoint of :func:`embed`: drop the negative-energy bins."""
    if f.space is not Space.FULL_LINE:
        raise SpaceMismatchError("restrict acts on FULL_LINE states")
    g = f.grid
    return StateVector(
        g, Space.HALF_LINE_POS, f.fibered()[g.n_sigma // 2 :, :].reshape(-1)
    )


@dataclass(frozen=True)
class LinOp:
    """Dense linear operator between tagged spaces on one grid.

    Because every space tag uses the same quadrature weight, the adjoint with
    respect to the weighted inner products is the plain conjugate transpose.
    """

    grid: GridSpec
    domain: Space
    codomain: Space
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        expected = (self.grid.dim(self.codomain), self.grid.dim(self.domain))
        if m.shape != expected:
            raise ValueError(f"matrix shape {m.shape}, expected {expected}")
        if self.hermitian:
            if self.domain is not self.codomain:
                raise ValueError("hermitian operator needs matching legs")
            scale = np.linalg.norm(m)
            dev = np.linalg.norm(m - m.conj().T)
            if dev > _HERMITIAN_RTOL * max(scale, 1.0):
                raise ValueError(
                    f"matrix declared hermitian deviates by {dev:.3e} "
                    f"(relative to norm {scale:.3e})"
                )

    def apply(self, f: StateVector) -> StateVector:
        if f.grid != self.grid or f.space is not self.domain:
            raise SpaceMismatchError(
                f"operator domain {self.domain.value} does not accept a "
                f"{f.space.value} state (or grids differ)"
            )
        return StateVector(self.grid, self.codomain, self.matrix @ f.amplitudes)

    def adjoint(self) -> "LinOp":
        return LinOp(
            grid=self.grid,
            domain=self.codomain,
            codomain=self.domain,
            matrix=self.matrix.conj().T,
            hermitian=self.hermitian,
        )

    def __matmul__(self, other: "LinOp") -> "LinOp":
        if not isinstance(other, LinOp):
            return NotImplemented
        if self.grid != other.grid or other.codomain is not self.domain:
            raise SpaceMismatchError(
                f"cannot compose {self.domain.value} <- {other.codomain.value}"
            )
        return LinOp(
            grid=self.grid,
            domain=other.domain,
            codomain=self.codomain,
            matrix=self.matrix @ other.matrix,
        )


def identity_op(grid: GridSpec, space: Space) -> LinOp:
    n = grid.dim(space)
    return LinOp(grid, space, space, np.eye(n, dtype=np.complex128), hermitian=True)
