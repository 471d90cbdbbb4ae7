"""Equilibration detection, L2 convergence, resonance spectra and entropy."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qca import Trajectory


@dataclass(frozen=True)
class AnalysisConfig:
    epsilon: float = 1e-3
    window: int = 5
    horizon: int = 500

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.horizon < self.window:
            raise ValueError("horizon must be at least the window")


@dataclass(frozen=True, eq=False)
class EquilibrationReport:
    equilibrated: bool
    t_eq: int | None
    equilibrium_probabilities: np.ndarray
    epsilon_used: float
    window_used: int

    def to_dict(self) -> dict:
        return {
            "equilibrated": self.equilibrated,
            "tEq": self.t_eq,
            "equilibriumProbabilities": [float(p) for p in self.equilibrium_probabilities],
            "epsilonUsed": self.epsilon_used,
            "windowUsed": self.window_used,
        }


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    frequencies: np.ndarray  # DFT bin indices 0..L//2
    power: np.ndarray
    dominant: list

    def to_dict(self) -> dict:
        return {
            "frequencies": [int(k) for k in self.frequencies],
            "power": [float(p) for p in self.power],
            "dominant": [int(k) for k in self.dominant],
        }


def _probabilities(traj) -> np.ndarray:
    if isinstance(traj, Trajectory):
        return traj.probabilities
    p = np.asarray(traj, dtype=float)
    if p.ndim != 2:
        raise ValueError("expected a (steps, basis states) probability array")
    return p


def equilibration_time(traj, cfg: AnalysisConfig = AnalysisConfig()) -> EquilibrationReport:
    """First step after which every basis probability moves by less than
    ``epsilon`` for ``window`` consecutive transitions.

    The equilibrium distribution is the mean of the ``window + 1`` rows of
    that quiet stretch. Without equilibration (or past ``horizon``) it is the
    mean of the trajectory's last ``window + 1`` rows.
    """
    p = _probabilities(traj)
    w = cfg.window
    if p.shape[0] < w + 1:
        raise ValueError(f"trajectory of {p.shape[0]} rows is shorter than window + 1 = {w + 1}")
    change = np.max(np.abs(np.diff(p, axis=0)), axis=1)
    quiet = (change < cfg.epsilon).astype(int)
    # run[t] = number of quiet transitions among t..t+w-1
    run = np.convolve(quiet, np.ones(w, dtype=int), mode="valid")
    candidates = np.flatnonzero(run == w)
    candidates = candidates[candidates <= cfg.horizon]
    if candidates.size:
        t_eq = int(candidates[0])
        eq = p[t_eq : t_eq + w + 1].mean(axis=0)
        return EquilibrationReport(True, t_eq, eq, cfg.epsilon, w)
    return EquilibrationReport(False, None, p[-(w + 1) :].mean(axis=0), cfg.epsilon, w)


def l2_convergence(traj, window: int = AnalysisConfig.window) -> np.ndarray:
    """``d(t) = |p(t) - pbar|_2`` with ``pbar`` the mean of the last ``window + 1`` rows."""
    p = _probabilities(traj)
    if p.shape[0] == 0:
        raise ValueError("empty trajectory")
    pbar = p[-(window + 1) :].mean(axis=0)
    return np.linalg.norm(p - pbar, axis=1)


def fourier_spectrum(traj, relative_threshold: float = 0.1) -> SpectrumReport:
    """One-sided power spectrum of the mean-subtracted probability series.

    Power is summed over basis states and normalized so that it adds up to
    the total squared deviation from the mean (Parseval).
    """
    p = _probabilities(traj)
    length = p.shape[0]
    if length < 8:
        raise ValueError(f"need at least 8 samples for a spectrum, got {length}")
    x = p - p.mean(axis=0)
    coeffs = np.fft.rfft(x, axis=0)
    power = np.sum(np.abs(coeffs) ** 2, axis=1) / length
    # Fold the negative frequencies in; DC and (even-length) Nyquist appear once.
    fold = np.full(power.size, 2.0)
    fold[0] = 1.0
    if length % 2 == 0:
        fold[-1] = 1.0
    power = power * fold
    freqs = np.arange(power.size)
    ac = power[1:]
    dominant = []
    if ac.size and ac.max() > 1e-24:
        dominant = [int(k) + 1 for k in np.flatnonzero(ac > relative_threshold * ac.max())]
    return SpectrumReport(freqs, power, dominant)


def shannon_entropy(probabilities) -> float:
    """Entropy in bits of a probability vector (renormalized, ``0 log 0 = 0``)."""
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    if np.any(p < -1e-12):
        raise ValueError("probabilities must be nonnegative")
    total = p.sum()
    if abs(total - 1) > 1e-6:
        raise ValueError(f"probabilities sum to {total}, not 1")
    p = np.clip(p, 0, None) / total
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))
