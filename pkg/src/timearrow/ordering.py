"""Past/future projections, their spectral measure, and the ordering operator.

At each lattice time the contraction semigroup splits the half-line space
into a past subspace (states already annihilated, ``Ker Z(t)``) and its
orthogonal complement, the future subspace.  Two equivalent formulas are
exposed for the past projection:

* :func:`past_projection` evaluates the literal commutator ``[Z(t), Z*(t)]``.
  In the finite window this expression carries a defect of rank ``k * k_dim``
  supported at the far edge of the time window (``T_u(t) T_u(t)*`` is the
  identity only up to that edge), so it is an exact projection on — and only
  on — states whose transport stays clear of the edge (guard-banded states).
* :func:`spectral_measure` builds the family from the complement form
  ``I - Z*(t) Z(t)``, which is an exact orthogonal projection of the discrete
  model for every lattice time; this is the form used for the measure, its
  increments, and the assembled ordering operator.

The two agree wherever states keep the guard band empty, and coincide in the
continuum model where both window edges recede to infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolution import unitary_evolve
from .lambda_transform import IrreversibleModel, z_adjoint, z_evolve, z_matrix
from .spaces import LinOp, Space, StateVector, inner, norm

__all__ = [
    "ProjectionFamily",
    "OrderingOperator",
    "past_projection",
    "future_projection",
    "spectral_measure",
    "assemble_T",
    "projection_rank",
    "irreversible_matrix_element",
    "correspondence_check",
]

# Projection spectra must cluster at {0, 1} at least this tightly for a rank
# decision to be meaningful.
_CLUSTER_GAP = 1e-4


def _hermitized(model: IrreversibleModel, m: np.ndarray) -> LinOp:
    m = 0.5 * (m + m.conj().T)
    return LinOp(
        model.grid, Space.HALF_LINE_POS, Space.HALF_LINE_POS, m, hermitian=True
    )


def past_projection(
    model: IrreversibleModel, t: float, snap: bool = False
) -> LinOp:
    """Projection onto states the semigroup has killed by time ``t``.

    Evaluated literally as the commutator ``Z(t)Z*(t) - Z*(t)Z(t)``; see the
    module note for its finite-window domain of validity.  At ``t = 0`` it
    vanishes identically.
    """
    z = z_matrix(model, t, snap=snap)
    zh = z.conj().T
    return _hermitized(model, z @ zh - zh @ z)


def future_projection(
    model: IrreversibleModel, t: float, snap: bool = False
) -> LinOp:
    """Projection onto the forward-relevant subspace, ``Z*(t) Z(t)``.

    An exact orthogonal projection of the discrete model (the shift's
    isometric leg has no edge defect), equal to ``I`` at ``t = 0``.
    """
    z = z_matrix(model, t, snap=snap)
    return _hermitized(model, z.conj().T @ z)


@dataclass(frozen=True)
class ProjectionFamily:
    """Increasing family of past projections and its interval increments.

    ``projections[i]`` is the past projection at ``times[i]`` (complement
    form); ``increments[i]`` is the measure of the half-open interval
    ``(times[i], times[i+1]]``, i.e. the difference of consecutive
    projections.  The family starts at ``times[0] = 0`` with the zero
    projection and is nested: earlier projections absorb into later ones.
    """

    times: np.ndarray
    projections: tuple
    increments: tuple

    def __post_init__(self):
        t = np.ascontiguousarray(self.times, dtype=np.float64)
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("a projection family needs at least two times")
        if abs(t[0]) > 1e-12:
            raise ValueError(f"family must start at t = 0, got {t[0]}")
        if np.any(np.diff(t) <= 0):
            raise ValueError("family times must be strictly increasing")
        if len(self.projections) != t.size or len(self.increments) != t.size - 1:
            raise ValueError("array lengths inconsistent with the time grid")


@dataclass(frozen=True)
class OrderingOperator:
    """Riemann–Stieltjes assembly ``sum(t_mid * increment)`` of the measure.

    Hermitian with spectrum inside ``[0, truncation_time]``; commutes with
    every projection in the generating family.  The finite window truncates
    the continuum operator's unbounded spectrum at ``truncation_time``.
    """

    matrix: LinOp
    time_grid: np.ndarray
    truncation_time: float

    def __post_init__(self):
        t = np.ascontiguousarray(self.time_grid, dtype=np.float64)
        t.setflags(write=False)
        object.__setattr__(self, "time_grid", t)


def spectral_measure(
    model: IrreversibleModel, time_grid, snap: bool = False
) -> ProjectionFamily:
    """Past-projection family and interval increments on a lattice time grid.

    The grid must increase strictly from 0.  Each projection is the exact
    complement form ``I - Z*(t)Z(t)``; increments are their consecutive
    differences, Hermitian with spectra in ``[0, 1]`` and summing
    telescopically to the final projection.
    """
    times = np.asarray(time_grid, dtype=np.float64)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("time grid must be 1-d with at least two points")
    if abs(times[0]) > 1e-12:
        raise ValueError(f"time grid must start at 0, got {times[0]}")
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    eye = np.eye(model.grid.dim(Space.HALF_LINE_POS), dtype=np.complex128)
    projections = []
    for t in times:
        q = future_projection(model, float(t), snap=snap)
        projections.append(_hermitized(model, eye - q.matrix))
    increments = tuple(
        _hermitized(model, projections[i + 1].matrix - projections[i].matrix)
        for i in range(times.size - 1)
    )
    return ProjectionFamily(
        times=times, projections=tuple(projections), increments=increments
    )


def assemble_T(family: ProjectionFamily) -> OrderingOperator:
    """Assemble the ordering operator from a projection family.

    ``T = sum over intervals of midpoint * increment``.  Because all
    increments are simultaneously diagonalizable (they are transported
    sub-blocks of one diagonal family), T commutes with every projection in
    the family and its eigenvalues are exactly the interval midpoints, each
    with multiplicity equal to its increment's rank.
    """
    if len(family.increments) == 0:
        raise ValueError("cannot assemble an ordering operator from an empty family")
    grid = family.projections[0].grid
    dim = grid.dim(Space.HALF_LINE_POS)
    acc = np.zeros((dim, dim), dtype=np.complex128)
    mids = 0.5 * (family.times[1:] + family.times[:-1])
    for mid, inc in zip(mids, family.increments):
        acc += mid * inc.matrix
    acc = 0.5 * (acc + acc.conj().T)
    op = LinOp(grid, Space.HALF_LINE_POS, Space.HALF_LINE_POS, acc, hermitian=True)
    return OrderingOperator(
        matrix=op,
        time_grid=family.times,
        truncation_time=float(family.times[-1]),
    )


def projection_rank(p: LinOp) -> int:
    """Rank of a projection via its eigenvalue clusters.

    Requires every eigenvalue to sit within ``1e-4`` of 0 or 1 (raises
    otherwise — the input was not numerically a projection) and counts the
    cluster at 1 using the midpoint threshold.
    """
    vals = np.linalg.eigvalsh(p.matrix)
    dist = np.minimum(np.abs(vals), np.abs(vals - 1.0))
    worst = float(dist.max(initial=0.0))
    if worst > _CLUSTER_GAP:
        raise ValueError(
            f"spectrum not clustered at {{0,1}}: worst deviation {worst:.3e}"
        )
    return int(np.count_nonzero(vals > 0.5))


def _require_hermitian_op(x: LinOp) -> None:
    m = x.matrix
    dev = np.linalg.norm(m - m.conj().T)
    if dev > 1e-12 * max(np.linalg.norm(m), 1.0):
        raise ValueError(f"observable must be Hermitian (deviation {dev:.3e})")


def irreversible_matrix_element(
    model: IrreversibleModel,
    phi: StateVector,
    psi: StateVector,
    x_lambda: LinOp,
    t: float,
    snap: bool = False,
) -> tuple[complex, complex, float]:
    """Matrix element of an observable in both dynamical pictures.

    The observable enters in its irreversible form ``x_lambda``; the
    reversible-picture operator is ``X = lam x_lambda lam`` (defined this
    way around — never by inverting ``lam``).  Returns

    * the reversible element ``(u(t)phi, X u(t)psi)``,
    * the irreversible element computed from the future-projected
      transported states, ``(P phi_lam, Z*(t) x_lambda Z(t) P psi_lam)``
      with ``P`` the future projection at ``t``,
    * the absolute difference.

    The two agree because inserting the future projection next to ``Z(t)``
    is exact: the past subspace is annihilated by the forward semigroup.
    """
    if phi.space is not Space.HALF_LINE_POS or psi.space is not Space.HALF_LINE_POS:
        raise ValueError("matrix elements take HALF_LINE_POS states")
    if x_lambda.domain is not Space.HALF_LINE_POS or (
        x_lambda.codomain is not Space.HALF_LINE_POS
    ):
        raise ValueError("x_lambda must act on the half-line space")
    _require_hermitian_op(x_lambda)
    lam = model.lam
    # reversible picture
    phi_t = unitary_evolve(phi, t)
    psi_t = unitary_evolve(psi, t)
    lhs = inner(phi_t, lam.apply(x_lambda.apply(lam.apply(psi_t))))
    # irreversible picture, through the future-projected transported states
    phi_plus = z_adjoint(model, z_evolve(model, lam.apply(phi), t, snap=snap), t)
    psi_plus = z_adjoint(model, z_evolve(model, lam.apply(psi), t, snap=snap), t)
    a = z_evolve(model, phi_plus, t, snap=snap)
    b = x_lambda.apply(z_evolve(model, psi_plus, t, snap=snap))
    rhs = inner(a, b)
    return lhs, rhs, abs(lhs - rhs)


def correspondence_check(
    model: IrreversibleModel, psi: StateVector, t: float, snap: bool = False
) -> tuple[float, float, float]:
    """Both sides of the expectation correspondence, with their gap.

    Returns ``(psi_t, M psi_t)`` from the reversible picture, the
    irreversible-picture value ``(psi_lam, P_future(t) psi_lam) =
    |Z(t) psi_lam|^2``, and their difference relative to the trajectory's
    initial expectation ``|lam psi|^2``.  Both sides decay monotonically
    from that common initial value and the rounding error of the comparison
    scales with it, so it is the meaningful yardstick even at late times
    when both sides have decayed to the roundoff floor (where a pointwise
    quotient would be pure noise).
    """
    if psi.space is not Space.HALF_LINE_POS:
        raise ValueError("correspondence_check expects a HALF_LINE_POS state")
    psi_t = unitary_evolve(psi, t)
    lhs = float(inner(psi_t, model.m_f.apply(psi_t)).real)
    transported = model.lam.apply(psi)
    moved = z_evolve(model, transported, t, snap=snap)
    rhs = float(norm(moved) ** 2)
    denom = max(norm(transported) ** 2, np.finfo(float).tiny)
    return lhs, rhs, abs(lhs - rhs) / denom
