"""Evolution group, compressed semigroup, and the kernel witness state.

``unitary_evolve`` multiplies by the diagonal phase ``exp(-i sigma t)``; in
the time domain this is a lattice shift, so a state's profile moves left by
``t``.  Compressing the group to the positive Hardy subspace gives the
truncated-left-shift semigroup ``toeplitz_step`` and its isometric-on-
guard-banded-states adjoint ``toeplitz_adjoint``.

Shift identities are exact only at lattice times ``t = k * delta_tau``;
everything here therefore takes a ``snap`` flag: off-lattice times raise
:class:`OffLatticeTimeError` by default, or are rounded to the nearest
lattice point with an :class:`OffLatticeWarning` when ``snap=True``.
"""

from __future__ import annotations

import warnings

import numpy as np

from .hardy import hardy_embed, hardy_part
from .spaces import GridSpec, Space, SpaceMismatchError, StateVector, zero_state

__all__ = [
    "OffLatticeTimeError",
    "OffLatticeWarning",
    "lattice_index",
    "unitary_evolve",
    "toeplitz_step",
    "toeplitz_adjoint",
    "toeplitz_shift_oracle",
    "kernel_witness",
]

# Relative slack when deciding whether a time sits on the dual lattice.
_LATTICE_RTOL = 1e-9


class OffLatticeTimeError(ValueError):
    """A time was not a multiple of delta_tau and snapping was not allowed."""


class OffLatticeWarning(UserWarning):
    """A time was silently rounded to the nearest dual-lattice point."""


def lattice_index(grid: GridSpec, t: float, snap: bool = False) -> int:
    """Convert a time to its dual-lattice index ``k`` with ``t = k*delta_tau``.

    Raises :class:`OffLatticeTimeError` for off-lattice times unless
    ``snap=True``, in which case the nearest index is used and an
    :class:`OffLatticeWarning` is emitted.
    """
    ratio = t / grid.delta_tau
    k = int(round(ratio))
    if abs(ratio - k) > _LATTICE_RTOL * max(1.0, abs(ratio)):
        if not snap:
            raise OffLatticeTimeError(
                f"t = {t} is not on the dual lattice (delta_tau = "
                f"{grid.delta_tau}); pass snap=True to round"
            )
        warnings.warn(
            f"t = {t} snapped to lattice point {k * grid.delta_tau}",
            OffLatticeWarning,
            stacklevel=3,
        )
    return k


def unitary_evolve(f: StateVector, t: float) -> StateVector:
    """Apply the evolution group: multiply bin ``j`` by ``exp(-i sigma_j t)``.

    Accepts any space tag and arbitrary real ``t``; norm-preserving, with the
    exact group law ``u(t)u(s) = u(t+s)``.  The positive Hardy subspace is
    not invariant under the group (forward evolution shifts its time profile
    across the cut), so HARDY_PLUS input is embedded first and the result
    carries the FULL_LINE tag; compress with :func:`toeplitz_step` /
    :func:`toeplitz_adjoint` to stay inside the subspace.
    """
    if f.space is Space.HARDY_PLUS:
        f = hardy_embed(f)
    sigma = f.grid.sigma() if f.space is Space.FULL_LINE else f.grid.sigma_pos()
    phase = np.exp(-1j * sigma * t)
    out = phase[:, None] * f.fibered()
    return StateVector(f.grid, f.space, out.reshape(-1))


def _hardy_lattice_step(f: StateVector, t: float, snap: bool, sign: int) -> int:
    if f.space is not Space.HARDY_PLUS:
        raise SpaceMismatchError("Toeplitz operators act on HARDY_PLUS states")
    k = lattice_index(f.grid, t, snap=snap)
    if k < 0:
        raise ValueError(f"Toeplitz semigroup times must be >= 0, got t = {t}")
    return sign * k


def toeplitz_step(f: StateVector, t: float, snap: bool = False) -> StateVector:
    """Compression of forward evolution to the positive Hardy subspace.

    Computed by the spectral route: embed, multiply by the evolution phase at
    the snapped lattice time, and project back.  On lattice times this equals
    the truncated left shift of the stored time samples
    (:func:`toeplitz_shift_oracle`) to machine precision.  Contractive, with
    the exact semigroup law; annihilates every state once ``t`` reaches half
    the time window.
    """
    k = _hardy_lattice_step(f, t, snap, +1)
    if k >= f.grid.n_sigma // 2:
        return zero_state(f.grid, Space.HARDY_PLUS)
    return hardy_part(unitary_evolve(f, k * f.grid.delta_tau))


def toeplitz_adjoint(f: StateVector, t: float, snap: bool = False) -> StateVector:
    """Adjoint of :func:`toeplitz_step`: backward evolution restricted back.

    Equals multiplication by ``exp(+i sigma t)`` followed by the Hardy
    projection.  On the lattice this is the right shift of the time samples
    that drops whatever crosses the far window edge, so it is isometric
    exactly on states with no power near that edge (guard-banded states).
    """
    k = _hardy_lattice_step(f, t, snap, +1)
    if k >= f.grid.n_sigma // 2:
        return zero_state(f.grid, Space.HARDY_PLUS)
    return hardy_part(unitary_evolve(f, -k * f.grid.delta_tau))


def toeplitz_shift_oracle(f: StateVector, t: float, snap: bool = False) -> StateVector:
    """Time-domain oracle for :func:`toeplitz_step`: literal truncated shift."""
    k = _hardy_lattice_step(f, t, snap, +1)
    b = f.fibered()
    out = np.zeros_like(b)
    if k < b.shape[0]:
        out[: b.shape[0] - k, :] = b[k:, :]
    return StateVector(f.grid, Space.HARDY_PLUS, out.reshape(-1))


def kernel_witness(
    grid: GridSpec,
    mu: complex,
    t0: float,
    v: np.ndarray | None = None,
    snap: bool = True,
) -> StateVector:
    """State annihilated by the compressed semigroup once ``t >= t0``.

    Samples

    .. math:: f(\\sigma) = \\frac{1}{\\sqrt{2\\pi}}\\,
              \\frac{1 - e^{i\\sigma t_0} e^{-i\\mu t_0}}{\\sigma - \\mu}\\, v,

    whose time profile is ``-i e^{-i mu tau}`` on ``[0, t0)`` and zero
    elsewhere, then returns its positive-Hardy component.  The ``1/sqrt(2
    pi)`` factor makes the profile's prefactor a unit modulus constant, so
    for ``mu = -i, t0 = 1`` the squared norm is the time-domain integral
    ``(1 - e^{-2})/2`` up to truncation error.

    ``t0`` must sit on the dual lattice for the decay statements to converge
    under grid refinement; by default it is snapped there (with a warning
    when it moves).
    """
    mu = complex(mu)
    if not (mu.imag < 0):
        raise ValueError(f"witness pole {mu} must lie in the open lower half-plane")
    if not (t0 > 0):
        raise ValueError(f"witness support length t0 must be positive, got {t0}")
    k0 = lattice_index(grid, t0, snap=snap)
    if k0 < 1:
        raise ValueError(f"t0 = {t0} is below the lattice resolution")
    t0 = k0 * grid.delta_tau
    if v is None:
        v = np.zeros(grid.k_dim, dtype=np.complex128)
        v[0] = 1.0
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (grid.k_dim,):
        raise ValueError(f"fiber vector must have shape ({grid.k_dim},), got {v.shape}")
    sigma = grid.sigma()
    scalar = (1.0 - np.exp(1j * sigma * t0) * np.exp(-1j * mu * t0)) / (sigma - mu)
    scalar /= np.sqrt(2.0 * np.pi)
    full = StateVector(
        grid, Space.FULL_LINE, (scalar[:, None] * v[None, :]).reshape(-1)
    )
    return hardy_part(full)
