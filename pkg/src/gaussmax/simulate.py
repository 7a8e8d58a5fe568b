"""Monte Carlo sampling of the field on rectangle grids, and bound validation.

The field is sampled exactly on finite grids through a dense Cholesky factor
of the covariance matrix (grids capped at 10^4 points — beyond that, coarsen
rather than approximate silently).  Replicates draw from fixed per-replicate
substreams, so results are bit-identical for a given (seed, reps, grid)
regardless of batching.

Grid maxima underestimate the continuous maximum; the validation harness
therefore reports a grid-refinement sequence to show stabilization instead
of applying any bias correction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import streams
from .bounds import tail_bound
from .geometry import FaceDecomposition, GeometryKind
from .model import IsotropicModel, require_valid
from .randmat import McEstimate

MAX_GRID_POINTS = 10_000
JITTER_FLAG_LEVEL = 1e-9
_JITTER_LADDER = (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)
# BLAS matmul results depend bitwise on the row count, so replicates are
# always pushed through identically shaped (256, n) blocks: chunk boundaries
# sit at fixed multiples of 256 and the last block is zero-padded.  That
# makes each replicate's maximum a pure function of (seed, grid, replicate
# index), independent of reps and of how calls are split.
_BATCH_ROWS = 256


@dataclass(frozen=True)
class FieldGrid:
    """Regular grid over the rectangle prod_i [0, L_i].

    ``points`` has shape (count, d) with count = prod(resolution), ordered
    lexicographically by axis indices; every axis with resolution >= 2
    includes both endpoints 0 and L_i, so all rectangle vertices are grid
    points.
    """

    sides: tuple
    resolution: tuple
    points: np.ndarray

    def __post_init__(self):
        n = int(np.prod(self.resolution))
        if self.points.shape != (n, len(self.sides)):
            raise ValueError("points must have shape (prod(resolution), d)")
        self.points.setflags(write=False)

    @property
    def count(self) -> int:
        return self.points.shape[0]


def make_grid(sides, resolution) -> FieldGrid:
    """Build a FieldGrid; ``resolution`` is points per axis (int or per-axis).

    Resolution 1 on an axis degenerates to the single coordinate 0.
    """
    sides = tuple(float(s) for s in np.atleast_1d(np.asarray(sides, dtype=float)))
    if not sides or not all(math.isfinite(s) and s > 0 for s in sides):
        raise ValueError("sides must be positive finite reals")
    res = np.atleast_1d(np.asarray(resolution, dtype=int))
    if res.size == 1:
        res = np.full(len(sides), int(res[0]))
    if res.size != len(sides) or not np.all(res >= 1):
        raise ValueError("resolution must be a positive integer per axis")
    count = int(np.prod(res))
    if count > MAX_GRID_POINTS:
        raise ValueError(
            f"grid has {count} points, beyond the dense-Cholesky cap "
            f"{MAX_GRID_POINTS}; coarsen the resolution")
    axes = [np.linspace(0.0, s, r) if r > 1 else np.zeros(1)
            for s, r in zip(sides, res)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([mm.ravel() for mm in mesh], axis=1)
    return FieldGrid(sides=sides, resolution=tuple(int(r) for r in res),
                     points=pts)


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular L with L L^T = covariance + jitter * identity."""

    L: np.ndarray
    jitter: float

    @property
    def flagged(self) -> bool:
        """True when the jitter is large enough to distort tail estimates."""
        return self.jitter > JITTER_FLAG_LEVEL


def covariance_cholesky(m: IsotropicModel, grid: FieldGrid) -> CholeskyFactor:
    """Dense Cholesky factor of the grid covariance matrix.

    Smooth covariances make nearly-singular matrices on fine grids; the
    factorization retries with diagonal jitter escalating from 1e-12 by
    decades.  Failure at 1e-6 raises (degenerate model on this grid).
    """
    require_valid(m)
    if grid.count > MAX_GRID_POINTS:
        raise ValueError(f"grid exceeds {MAX_GRID_POINTS} points")
    p = grid.points
    sq = np.sum(p * p, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (p @ p.T)
    np.maximum(d2, 0.0, out=d2)
    cov = np.asarray(m.rho(d2), dtype=float)
    for jitter in _JITTER_LADDER:
        mat = cov if jitter == 0.0 else cov + jitter * np.eye(grid.count)
        try:
            L = scipy.linalg.cholesky(mat, lower=True, check_finite=False)
        except scipy.linalg.LinAlgError:
            continue
        return CholeskyFactor(L=L, jitter=jitter)
    raise ValueError(
        "covariance matrix is not positive definite even with jitter 1e-6; "
        "the model is degenerate on this grid")


def sample_maxima(m: IsotropicModel, grid: FieldGrid, reps: int, seed: int,
                  factor: CholeskyFactor | None = None) -> np.ndarray:
    """Maxima of ``reps`` independent field draws on the grid.

    Replicate r uses its own counter window of the seeded stream, so the
    result is bit-identical for fixed (seed, reps, grid) no matter how the
    computation is batched.  ``factor`` may pass a precomputed Cholesky
    factor (for example to reuse it across u-levels).
    """
    reps = int(reps)
    if reps < 1:
        raise ValueError("reps must be positive")
    if factor is None:
        factor = covariance_cholesky(m, grid)
    lt = factor.L.T
    n = grid.count
    out = np.empty(reps)
    done = 0
    while done < reps:
        nb = min(_BATCH_ROWS, reps - done)
        z = streams.normals(seed, streams.DOMAIN_FIELD, done, nb, n)
        if nb < _BATCH_ROWS:
            zp = np.zeros((_BATCH_ROWS, n))
            zp[:nb] = z
            vals = (zp @ lt)[:nb]
        else:
            vals = z @ lt
        out[done:done + nb] = vals.max(axis=1)
        done += nb
    return out


@dataclass(frozen=True)
class ValidationReport:
    """Empirical maxima tails against the analytic tail bounds.

    The headline ``empirical`` estimates come from the finest grid of the
    refinement sequence; ``empirical_by_refinement`` keeps the whole
    sequence (one tuple of McEstimate per factor) to show stabilization.
    ``verdicts[i]`` is "bound_respected" iff
    empirical mean - 3 stderr <= pbar_tail, else "inconclusive".
    """

    u_values: tuple
    empirical: tuple
    pbar_tails: tuple
    pE_tails: tuple
    verdicts: tuple
    refinement_factors: tuple
    empirical_by_refinement: tuple
    jitters: tuple
    notes: tuple

    def to_csv(self) -> str:
        lines = ["u,emp_mean,emp_stderr,pbar_tail,pE_tail,verdict"]
        for i, u in enumerate(self.u_values):
            e = self.empirical[i]
            lines.append(",".join([
                f"{u:.17g}", f"{e.mean:.17g}", f"{e.stderr:.17g}",
                f"{self.pbar_tails[i]:.17g}", f"{self.pE_tails[i]:.17g}",
                self.verdicts[i]]))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "u_values": list(self.u_values),
            "empirical": [{"mean": e.mean, "stderr": e.stderr,
                           "reps": e.reps, "seed": e.seed}
                          for e in self.empirical],
            "pbar_tails": list(self.pbar_tails),
            "pE_tails": list(self.pE_tails),
            "verdicts": list(self.verdicts),
            "refinement_factors": list(self.refinement_factors),
            "empirical_by_refinement": [
                [{"mean": e.mean, "stderr": e.stderr,
                  "reps": e.reps, "seed": e.seed} for e in row]
                for row in self.empirical_by_refinement],
            "jitters": list(self.jitters),
            "notes": list(self.notes),
        }


def _empirical_tail(maxima: np.ndarray, u_values, reps: int,
                    seed: int) -> tuple:
    out = []
    for u in u_values:
        p = float(np.mean(maxima > u))
        se = math.sqrt(p * (1.0 - p) / reps)
        out.append(McEstimate(mean=p, stderr=se, reps=reps, seed=seed))
    return tuple(out)


def validate_bound(m: IsotropicModel, geom: FaceDecomposition,
                   grid: FieldGrid, u_values, reps: int, seed: int,
                   refinements=(1, 2, 4)) -> ValidationReport:
    """Check empirical P{max > u} against the analytic tail bounds.

    Runs the sampler on the base grid and on refinements of it (resolution
    multiplied by each factor), estimates the exceedance probability at each
    u, and compares the finest grid's estimates against pbar_tail / pE_tail.

    Grid maxima underestimate the continuous maximum, so "bound_respected"
    is conservative evidence for the bound; the refinement sequence is
    reported to show the discretization has stabilized.
    """
    require_valid(m)
    reps = int(reps)
    if reps < 2:
        raise ValueError("reps must be at least 2")
    u_values = tuple(float(u) for u in u_values)
    if not u_values:
        raise ValueError("need at least one u level")
    refinements = tuple(int(k) for k in refinements)
    if not refinements or any(k < 1 for k in refinements):
        raise ValueError("refinement factors must be positive integers")
    if geom.kind is GeometryKind.RECTANGLE and geom.sides is not None:
        if (len(geom.sides) != len(grid.sides)
                or any(abs(a - b) > 1e-12 for a, b in zip(geom.sides, grid.sides))):
            raise ValueError("geometry sides do not match the grid rectangle")

    tails = [tail_bound(m, geom, u) for u in u_values]
    pbar_tails = tuple(t.pbar_tail for t in tails)
    pE_tails = tuple(t.pE_tail for t in tails)

    emp_by_ref = []
    jitters = []
    for k in refinements:
        g = grid if k == 1 else make_grid(
            grid.sides, tuple(r * k for r in grid.resolution))
        factor = covariance_cholesky(m, g)
        maxima = sample_maxima(m, g, reps, seed, factor=factor)
        emp_by_ref.append(_empirical_tail(maxima, u_values, reps, seed))
        jitters.append(factor.jitter)

    final = emp_by_ref[-1]
    verdicts = tuple(
        "bound_respected" if e.mean - 3.0 * e.stderr <= pb else "inconclusive"
        for e, pb in zip(final, pbar_tails))
    notes = ["grid maxima underestimate the continuous maximum; verdicts "
             "compare the finest grid and the refinement sequence shows "
             "stabilization"]
    for k, j in zip(refinements, jitters):
        if j > JITTER_FLAG_LEVEL:
            notes.append(f"refinement x{k}: Cholesky needed jitter {j:g} "
                         "(above the reporting threshold); tail estimates "
                         "may be distorted at fine tolerances")
    return ValidationReport(u_values=u_values, empirical=final,
                            pbar_tails=pbar_tails, pE_tails=pE_tails,
                            verdicts=verdicts,
                            refinement_factors=refinements,
                            empirical_by_refinement=tuple(emp_by_ref),
                            jitters=tuple(jitters), notes=tuple(notes))
