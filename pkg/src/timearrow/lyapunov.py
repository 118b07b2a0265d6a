"""Forward quasi-affine map, Lyapunov operator, and expectation curves.

The map ``omega`` sends a half-line state to the positive-Hardy component of
its zero-padded extension; the Lyapunov operator is ``M = omega* omega``.
Expectation values ``(psi_t, M psi_t)`` along a unitary trajectory equal
``|T_u(t) omega psi|^2``, so curves are computed matrix-free through the FFT
transform pair — the dense matrices built here are only needed for spectra
and for the polar decomposition downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hardy import (
    _hardy_scale,
    _phase_factors,
    guard_band_leakage,
    hardy_embed,
    hardy_part,
)
from .spaces import GridSpec, LinOp, Space, StateVector, embed, norm, restrict
from .evolution import toeplitz_step, unitary_evolve

__all__ = [
    "TrajectoryReport",
    "apply_omega",
    "apply_omega_adjoint",
    "build_omega",
    "build_m_f",
    "lyapunov_expectation",
    "lyapunov_curve",
    "f_m_membership",
]


def apply_omega(psi: StateVector) -> StateVector:
    """Matrix-free forward map: zero-pad to the full line, keep the positive-
    Hardy part.  Contractive; HALF_LINE_POS -> HARDY_PLUS."""
    return hardy_part(embed(psi))


def apply_omega_adjoint(h: StateVector) -> StateVector:
    """Matrix-free adjoint: include the Hardy state in the full line, then
    restrict to positive frequencies.  HARDY_PLUS -> HALF_LINE_POS."""
    return restrict(hardy_embed(h))


def _transform_block(grid: GridSpec) -> np.ndarray:
    # Scalar (k_dim = 1) matrix of apply_omega: the block of the unitary
    # sigma->tau transform with positive-tau rows and positive-sigma columns,
    # carrying the sqrt(delta_tau/delta_sigma) sample scaling of HARDY_PLUS.
    n = grid.n_sigma
    nh = n // 2
    cols = np.zeros((n, nh), dtype=np.complex128)
    cols[nh:, :] = np.eye(nh)
    w, s, c = _phase_factors(grid)
    g = (c * s) * (w[:, None] * np.fft.fft(w[:, None] * cols, axis=0))
    return _hardy_scale(grid) * g[nh:, :]


def _fiberize(block: np.ndarray, k_dim: int) -> np.ndarray:
    if k_dim == 1:
        return block
    return np.kron(block, np.eye(k_dim))


def build_omega(grid: GridSpec) -> LinOp:
    """Dense matrix of the forward map on the given grid.

    Contractive (largest singular value <= 1) and injective in the discrete
    model; the smallest singular value shrinks toward zero as the grid
    refines, which is why downstream factorizations never invert it.
    """
    block = _transform_block(grid)
    return LinOp(
        grid,
        Space.HALF_LINE_POS,
        Space.HARDY_PLUS,
        _fiberize(block, grid.k_dim),
    )


def build_m_f(grid: GridSpec) -> LinOp:
    """Dense Lyapunov operator ``omega* omega``, hermitized.

    Hermitian, nonnegative, contractive, and injective on the discrete
    half-line space; its eigenvalues fill (0, 1) increasingly densely as the
    grid refines.
    """
    om = build_omega(grid).matrix
    m = om.conj().T @ om
    m = 0.5 * (m + m.conj().T)
    return LinOp(grid, Space.HALF_LINE_POS, Space.HALF_LINE_POS, m, hermitian=True)


def lyapunov_expectation(psi: StateVector, t: float, snap: bool = False) -> float:
    """Expectation ``(psi_t, M psi_t)`` at lattice time ``t``, matrix-free.

    Equal to ``|T_u(t) omega psi|^2`` by the intertwining of the forward map
    with evolution, hence non-increasing in ``t`` and bounded by ``|psi|^2``.
    """
    if psi.space is not Space.HALF_LINE_POS:
        raise ValueError("lyapunov_expectation expects a HALF_LINE_POS state")
    moved = toeplitz_step(apply_omega(psi), t, snap=snap)
    return float(norm(moved) ** 2)


@dataclass(frozen=True)
class TrajectoryReport:
    """Expectation curve along a unitary trajectory plus diagnostics.

    ``expectations[i] = (psi_{t_i}, M psi_{t_i})`` and ``norms[i] =
    |psi_{t_i}|`` (constant up to rounding — evolution is unitary).
    ``max_monotonicity_violation`` is the largest increase between
    consecutive expectations (0.0 for a perfectly monotone curve) and
    ``guard_band_leakage`` is the time-profile leakage diagnostic of the
    initial state's forward image.
    """

    times: np.ndarray
    expectations: np.ndarray
    norms: np.ndarray
    guard_band_leakage: float
    max_monotonicity_violation: float

    def __post_init__(self) -> None:
        if not (len(self.times) == len(self.expectations) == len(self.norms)):
            raise ValueError("trajectory arrays must have equal length")


def lyapunov_curve(
    psi: StateVector, time_grid: np.ndarray, snap: bool = False
) -> TrajectoryReport:
    """Evaluate the expectation curve on a lattice time grid.

    The forward image ``omega psi`` is computed once and shifted per time
    point, so a curve over many times costs two FFTs per point.
    """
    if psi.space is not Space.HALF_LINE_POS:
        raise ValueError("lyapunov_curve expects a HALF_LINE_POS state")
    times = np.asarray(time_grid, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a nonempty 1-d array")
    b = apply_omega(psi)
    expectations = np.empty(times.size, dtype=np.float64)
    norms = np.empty(times.size, dtype=np.float64)
    for i, t in enumerate(times):
        expectations[i] = norm(toeplitz_step(b, float(t), snap=snap)) ** 2
        norms[i] = norm(unitary_evolve(psi, float(t)))
    diffs = np.diff(expectations)
    violation = float(diffs.max(initial=0.0).clip(min=0.0))
    return TrajectoryReport(
        times=times,
        expectations=expectations,
        norms=norms,
        guard_band_leakage=guard_band_leakage(b),
        max_monotonicity_violation=violation,
    )


def f_m_membership(psi: StateVector, m: float) -> bool:
    """Whether ``psi`` lies in the ordering set of level ``m``.

    True iff the normalized expectation ``(psi, M psi)/|psi|^2`` is at most
    ``m``.  The sets nest by construction, every state belongs at ``m = 1``
    (contractivity), and none at ``m = 0`` (injectivity); forward evolution
    never leaves a set.
    """
    if psi.space is not Space.HALF_LINE_POS:
        raise ValueError("f_m_membership expects a HALF_LINE_POS state")
    ns = norm(psi) ** 2
    if ns == 0.0:
        raise ValueError("membership is undefined for the zero state")
    return float(norm(apply_omega(psi)) ** 2) / ns <= m
