"""Small dense linear-algebra helpers shared by the estimation modules.

All routines operate on stacks of per-frequency matrices, shape F x P x P.
Channel counts are small (P <= 8, prediction stacks a few hundred), so dense
LAPACK-backed methods are used throughout.
"""

import numpy as np

from .errors import SingularMatrixError


def hermitize(mats):
    """Symmetrized accumulation: average a matrix stack with its adjoint."""
    return 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))


def time_outer(a, b):
    """Sum of per-frame outer products, Sum_t a(t,f) b(t,f)^H.

    Arguments:
        a, b: complex arrays, T x F x P / T x F x Q
    Return:
        F x P x Q
    """
    # F x P x T @ F x T x Q batched matmul
    return np.matmul(a.transpose(1, 2, 0), np.conj(b).transpose(1, 0, 2))


def load_hermitian(mats, loading):
    """Add relative (trace-scaled) diagonal loading to a Hermitian stack.

    The load is loading * trace/P per frequency; when a matrix has zero trace
    the scale falls back to 1.0, i.e. the load becomes absolute, so exactly
    zero covariances still yield a well-posed system.
    """
    mats = np.asarray(mats)
    p = mats.shape[-1]
    scale = np.trace(mats, axis1=-2, axis2=-1).real / p
    scale = np.where(scale > 0.0, scale, 1.0)
    return mats + (loading * scale)[..., None, None] * np.eye(p)


def solve_stack(mats, rhs):
    """Solve mats[f] @ x[f] = rhs[f] for every frequency.

    Arguments:
        mats: F x P x P
        rhs: F x P or F x P x K
    Return:
        solution with the same shape as rhs
    Raises:
        SingularMatrixError naming the first offending frequency bin.
    """
    squeeze = rhs.ndim == mats.ndim - 1
    b = rhs[..., None] if squeeze else rhs
    try:
        sol = np.linalg.solve(mats, b)
    except np.linalg.LinAlgError:
        _locate_singular(mats)
        raise SingularMatrixError("singular system in batched solve")
    if not np.all(np.isfinite(sol)):
        _locate_singular(mats)
        bad = int(np.argwhere(~np.isfinite(sol))[0][0])
        raise SingularMatrixError(
            f"non-finite solve result at frequency bin {bad}", frequency_bin=bad
        )
    return sol[..., 0] if squeeze else sol


def _locate_singular(mats):
    # find the first frequency whose matrix cannot be solved, for reporting
    probe = np.zeros(mats.shape[-1])
    probe[0] = 1.0
    for f in range(mats.shape[0]):
        try:
            x = np.linalg.solve(mats[f], probe)
        except np.linalg.LinAlgError:
            x = np.array([np.inf])
        if not np.all(np.isfinite(x)):
            raise SingularMatrixError(
                f"singular matrix at frequency bin {f} (even after loading)",
                frequency_bin=f,
            )


def cholesky_stack(mats):
    """Batched Cholesky factorization with per-bin failure reporting."""
    try:
        return np.linalg.cholesky(mats)
    except np.linalg.LinAlgError:
        for f in range(mats.shape[0]):
            try:
                np.linalg.cholesky(mats[f])
            except np.linalg.LinAlgError:
                raise SingularMatrixError(
                    f"matrix at frequency bin {f} is not positive definite",
                    frequency_bin=f,
                ) from None
        raise


def principal_eigenpairs(mats):
    """Largest eigenvalue and eigenvector of each Hermitian matrix.

    Return:
        (values [F], vectors [F x P], gaps [F]) where gaps is the distance
        between the two largest eigenvalues (inf for P = 1).
    """
    vals, vecs = np.linalg.eigh(mats)
    top = vals[:, -1]
    if mats.shape[-1] > 1:
        gaps = top - vals[:, -2]
    else:
        gaps = np.full(top.shape, np.inf)
    return top, vecs[:, :, -1], gaps


def rotate_reference_phase(vectors, ref_mic):
    """Rotate each row so entry `ref_mic` is real and nonnegative.

    Rows whose reference entry is exactly zero are left untouched.
    """
    pivot = vectors[:, ref_mic]
    mag = np.abs(pivot)
    safe = np.where(mag > 0.0, mag, 1.0)
    phase = np.where(mag > 0.0, np.conj(pivot) / safe, 1.0)
    return vectors * phase[:, None]
