"""Online fixation/saccade segmentation of gaze-point speed.

A two-component Gaussian mixture over scalar gaze-point speed is refit by EM
at a fixed interval over a trailing buffer.  The component with the smaller
mean models fixations; samples whose posterior favors it are fixations, the
rest are saccades.  Until the first refit completes every sample stays
unclassified, which downstream stages treat as "not a fixation".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RejectedSampleError
from .scene import GazeKind, GazePoint, with_kind

_VAR_FLOOR = 1e-12
_WEIGHT_FLOOR = 1e-6


def _gauss_pdf(x: np.ndarray, mean: float, var: float) -> np.ndarray:
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2.0 * np.pi * var)


@dataclass
class GmmState:
    """Two-component mixture over gaze speed plus the online refit buffer.

    Component 0 always has the smaller mean (fixations) after every refit.
    """

    refit_interval: float = 2.0
    buffer_horizon: float = 5.0
    min_fit_samples: int = 10
    weights: np.ndarray = field(default_factory=lambda: np.array([0.5, 0.5]))
    means: np.ndarray = field(default_factory=lambda: np.zeros(2))
    variances: np.ndarray = field(default_factory=lambda: np.ones(2))
    fitted: bool = False
    _buffer_t: list = field(default_factory=list)
    _buffer_speed: list = field(default_factory=list)
    _next_refit_time: float | None = None

    # ------------------------------------------------------------------

    def observe(self, timestamp: float, speed: float) -> None:
        self._buffer_t.append(timestamp)
        self._buffer_speed.append(speed)
        # Trim entries older than the trailing horizon.
        cutoff = timestamp - self.buffer_horizon
        drop = 0
        while drop < len(self._buffer_t) and self._buffer_t[drop] < cutoff:
            drop += 1
        if drop:
            del self._buffer_t[:drop]
            del self._buffer_speed[:drop]
        if self._next_refit_time is None:
            self._next_refit_time = timestamp + self.refit_interval
        elif timestamp >= self._next_refit_time:
            if len(self._buffer_speed) >= self.min_fit_samples:
                self.refit(np.asarray(self._buffer_speed))
            self._next_refit_time = timestamp + self.refit_interval

    def refit(self, speeds: np.ndarray, max_iter: int = 100, tol: float = 1e-10) -> None:
        """Deterministic EM fit; warm-started from the previous parameters."""
        speeds = np.asarray(speeds, dtype=float)
        if self.fitted:
            w, mu, var = self.weights.copy(), self.means.copy(), self.variances.copy()
        else:
            # Cold start: split at the median (k-means style).
            med = float(np.median(speeds))
            low, high = speeds[speeds <= med], speeds[speeds > med]
            if len(low) == 0 or len(high) == 0:
                low = high = speeds
            mu = np.array([np.mean(low), np.mean(high)])
            var = np.array([np.var(low), np.var(high)])
            w = np.array([len(low), max(len(high), 1)], dtype=float)
            w /= w.sum()
        var = np.maximum(var, _VAR_FLOOR)
        if mu[0] == mu[1]:
            mu = mu + np.array([0.0, 1e-9])

        prev_ll = -np.inf
        for _ in range(max_iter):
            p = w[:, None] * np.vstack(
                [_gauss_pdf(speeds, mu[k], var[k]) for k in range(2)]
            )
            total = np.maximum(p.sum(axis=0), 1e-300)
            resp = p / total
            ll = float(np.sum(np.log(total)))
            nk = np.maximum(resp.sum(axis=1), _WEIGHT_FLOOR)
            mu = resp @ speeds / nk
            var = np.maximum(
                np.array(
                    [resp[k] @ (speeds - mu[k]) ** 2 / nk[k] for k in range(2)]
                ),
                _VAR_FLOOR,
            )
            w = nk / nk.sum()
            if abs(ll - prev_ll) < tol:
                break
            prev_ll = ll

        order = np.argsort(mu)
        self.weights, self.means, self.variances = w[order], mu[order], var[order]
        self.fitted = True

    def fixation_posterior(self, speed: float) -> float:
        """Posterior probability that a speed belongs to the low-mean component."""
        if not self.fitted:
            raise RuntimeError("mixture not fitted yet")
        p = self.weights * np.array(
            [
                _gauss_pdf(np.array([speed]), self.means[k], self.variances[k])[0]
                for k in range(2)
            ]
        )
        total = p.sum()
        if total <= 0.0:
            # Far tail on both components: decide by nearest mean.
            return 1.0 if abs(speed - self.means[0]) < abs(speed - self.means[1]) else 0.0
        return float(p[0] / total)


def classify_fixation(
    state: GmmState, current: GazePoint, previous: GazePoint
) -> GazePoint:
    """Label the current gaze point as fixation or saccade from its speed.

    Classification uses the mixture as of the previous refit; the new speed is
    buffered afterwards and may trigger a refit for later samples.  Ambiguous
    speeds (posterior exactly 0.5) fall to saccade so that they can never
    raise the attention level.
    """
    dt = current.timestamp - previous.timestamp
    if dt <= 0:
        raise RejectedSampleError(
            f"non-increasing gaze timestamps: {previous.timestamp} -> {current.timestamp}"
        )
    speed = float(np.linalg.norm(current.position - previous.position)) / dt
    if state.fitted:
        kind = (
            GazeKind.FIXATION
            if state.fixation_posterior(speed) > 0.5
            else GazeKind.SACCADE
        )
    else:
        kind = GazeKind.UNCLASSIFIED
    state.observe(current.timestamp, speed)
    return with_kind(current, kind)
