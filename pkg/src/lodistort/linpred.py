"""Linear-prediction dereverberation.

Two flavors share one weighted least-squares core:

* wpe predicts the current frame from delayed past observation frames and
  subtracts the prediction (late-reverberation removal),
* fcp filters the current-and-past frames of a target estimate to match a
  reverberant reference, then removes the excess (the estimated reverberation
  of the estimate) from the reference.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import hermitize, load_hermitian, solve_stack

DEFAULT_LOADING = 1e-8
# absolute floor for the prediction-error weights
WEIGHT_ABS_FLOOR = 1e-12


@dataclass
class PredictionFilter:
    """Per-frequency prediction coefficients.

    Attributes:
        coeffs: complex array, F x (taps * channels); applied conjugated,
            prediction(t,f) = coeffs(f)^H stack(t,f)
        taps: prediction order
        delay: frame gap between predicted frame and newest predictor frame
        kind: "wpe" or "fcp"
    """

    coeffs: np.ndarray
    taps: int
    delay: int
    kind: str


def build_delayed_stack(field, taps, delay):
    """Stack delayed frames for prediction.

    Row t holds frames t-delay, t-delay-1, ..., t-delay-taps+1, channel-minor
    within each lag block; frames before the start of the signal are zeros.

    Arguments:
        field: complex spectrogram, T x F x P
        taps: number of lags K (>= 1)
        delay: base lag (>= 0)
    Return:
        complex array, T x F x (K * P)
    """
    field = np.asarray(field, dtype=np.complex128)
    if field.ndim != 3:
        raise ValueError(f"field must be T x F x P, got shape {field.shape}")
    if taps < 1:
        raise ValueError(f"taps must be >= 1, got {taps}")
    if delay < 0:
        raise ValueError(f"delay must be >= 0, got {delay}")
    num_frames, num_bins, num_channels = field.shape
    stack = np.zeros(
        (num_frames, num_bins, taps * num_channels), dtype=np.complex128
    )
    for k in range(taps):
        shift = delay + k
        block = slice(k * num_channels, (k + 1) * num_channels)
        if shift == 0:
            stack[:, :, block] = field
        elif shift < num_frames:
            stack[shift:, :, block] = field[:num_frames - shift]
    return stack


def _solve_normal_equations(stack, targets, weights, loading):
    # weighted Gram and cross terms; F x D x D @ F x D x M solves
    wstack = stack / weights[:, :, None]
    gram = hermitize(
        np.matmul(wstack.transpose(1, 2, 0), np.conj(stack).transpose(1, 0, 2))
    )
    rhs = np.einsum("tfd,tfm->fdm", wstack, np.conj(targets))
    return solve_stack(load_hermitian(gram, loading), rhs)


def solve_weighted_lp(stack, target, weights, loading=DEFAULT_LOADING):
    """Per-frequency weighted least squares for prediction coefficients.

    Minimizes Sum_t |target(t,f) - g(f)^H stack(t,f)|^2 / weights(t,f) via the
    normal equations, with relative diagonal loading on the Gram matrix.  An
    identically zero stack yields the zero filter (the loading falls back to
    an absolute identity load, and the right-hand side vanishes).

    Arguments:
        stack: T x F x D predictors
        target: T x F
        weights: strictly positive T x F
    Return:
        coefficients g, F x D
    """
    stack = np.asarray(stack, dtype=np.complex128)
    target = np.asarray(target, dtype=np.complex128)
    weights = np.asarray(weights, dtype=np.float64)
    if stack.ndim != 3:
        raise ValueError(f"stack must be T x F x D, got shape {stack.shape}")
    if target.shape != stack.shape[:2]:
        raise ValueError(
            f"target shape {target.shape} does not match stack frames/bins "
            f"{stack.shape[:2]}"
        )
    if weights.shape != stack.shape[:2]:
        raise ValueError("weights shape does not match stack frames/bins")
    if weights.min() <= 0.0:
        raise ValueError("weights must be strictly positive")
    coeffs = _solve_normal_equations(stack, target[:, :, None], weights, loading)
    return coeffs[:, :, 0]


def predict(coeffs, stack):
    """Apply prediction coefficients: out(t,f) = coeffs(f)^H stack(t,f)."""
    return np.einsum("fd,tfd->tf", np.conj(coeffs), stack)


def wpe(field, psd, taps, delay=3, ref_mic=0, loading=DEFAULT_LOADING):
    """Dereverberate one channel by delayed multichannel linear prediction.

    Arguments:
        field: observed spectrogram, T x F x P
        psd: positive prediction weights, T x F (floored target power)
        taps: prediction order K
        delay: prediction delay in frames (>= 1 so the direct frame and its
            immediate successors are never predicted away)
        ref_mic: channel to dereverberate
    Return:
        (PredictionFilter, dereverbed T x F)
    """
    field = np.asarray(field, dtype=np.complex128)
    if field.ndim != 3:
        raise ValueError(f"field must be T x F x P, got shape {field.shape}")
    if delay < 1:
        raise ValueError(f"delay must be >= 1 for wpe, got {delay}")
    if not 0 <= ref_mic < field.shape[2]:
        raise ValueError(f"ref_mic {ref_mic} out of range")
    stack = build_delayed_stack(field, taps, delay)
    coeffs = solve_weighted_lp(stack, field[:, :, ref_mic], psd, loading)
    dereverbed = field[:, :, ref_mic] - predict(coeffs, stack)
    return PredictionFilter(coeffs, taps, delay, "wpe"), dereverbed


def wpe_field(field, psd, taps, delay=3, loading=DEFAULT_LOADING):
    """Dereverberate every channel with a shared stack and shared weights.

    One Gram factorization per frequency serves all channels (multiple
    right-hand sides).

    Return:
        (coefficients F x D x P, dereverbed field T x F x P)
    """
    field = np.asarray(field, dtype=np.complex128)
    if field.ndim != 3:
        raise ValueError(f"field must be T x F x P, got shape {field.shape}")
    if delay < 1:
        raise ValueError(f"delay must be >= 1 for wpe, got {delay}")
    psd = np.asarray(psd, dtype=np.float64)
    if psd.shape != field.shape[:2]:
        raise ValueError("psd shape does not match field frames/bins")
    if psd.min() <= 0.0:
        raise ValueError("psd must be strictly positive")
    stack = build_delayed_stack(field, taps, delay)
    coeffs = _solve_normal_equations(stack, field, psd, loading)  # F x D x P
    predictions = np.einsum("fdp,tfd->tfp", np.conj(coeffs), stack)
    return coeffs, field - predictions


def fcp_weight(reference, estimate, epsilon=1e-3):
    """Prediction-error weights from the reference-mic residual.

    max(epsilon * max |ref - est|^2, |ref - est|^2), floored absolutely so the
    weights stay strictly positive.
    """
    residual_power = np.abs(
        np.asarray(reference, dtype=np.complex128)
        - np.asarray(estimate, dtype=np.complex128)
    ) ** 2
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    floored = np.maximum(epsilon * residual_power.max(), residual_power)
    return np.maximum(floored, WEIGHT_ABS_FLOOR)


def fcp(reference, estimate, taps=40, epsilon=1e-3, loading=DEFAULT_LOADING):
    """Forward-filter the estimate onto the reference, keep only the excess.

    The filter g' minimizes Sum_t |ref - g'^H stack(est)|^2 / eta with a
    zero-delay stack of the estimate's current and past frames; the output is

        ref - (g'^H stack(est) - est)

    i.e. the reference minus the estimated reverberation of the estimate.

    Arguments:
        reference, estimate: complex arrays, T x F
        taps: filter length K'
        epsilon: relative floor for the weights eta
    Return:
        (PredictionFilter, compensated T x F)
    """
    reference = np.asarray(reference, dtype=np.complex128)
    estimate = np.asarray(estimate, dtype=np.complex128)
    if reference.ndim != 2 or reference.shape != estimate.shape:
        raise ValueError(
            f"reference {reference.shape} and estimate {estimate.shape} must be "
            "matching T x F arrays"
        )
    eta = fcp_weight(reference, estimate, epsilon)
    stack = build_delayed_stack(estimate[:, :, None], taps, 0)
    coeffs = solve_weighted_lp(stack, reference, eta, loading)
    filtered = predict(coeffs, stack)
    compensated = reference - (filtered - estimate)
    return PredictionFilter(coeffs, taps, 0, "fcp"), compensated
