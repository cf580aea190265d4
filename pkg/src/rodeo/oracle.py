"""Closed-form predictions for every filter response curve.

All formulas here are evaluated analytically, never by simulating the
circuit, so they serve as an independent cross-check of the engine. The
central object is the spectral weight set {(E_x, w_x)} with w_x = |<x|psi>|^2;
the per-ancilla score averaged over Gaussian times t ~ Normal(tau, d^2) is

    hbar(E) = -sum_x w_x exp(-d^2 (E-E_x)^2 / 2) cos((E-E_x) tau)

and -hbar peaks at each eigenvalue with height equal to the level weight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import SpectralDecomposition
from .qcore import StateVector


@dataclass(frozen=True)
class GaussianTimeParams:
    """Mean tau and standard deviation d of the evolution-time distribution."""
    tau: float
    d: float

    def __post_init__(self):
        if not self.d > 0.0:
            raise ValueError("time spread d must be positive")


@dataclass(frozen=True)
class SpectralWeights:
    eigenvalues: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        ev = tuple(float(e) for e in self.eigenvalues)
        w = tuple(float(x) for x in self.weights)
        if len(ev) != len(w):
            raise ValueError("eigenvalues and weights differ in length")
        if any(x < -1e-12 for x in w):
            raise ValueError("negative weight")
        if abs(sum(w) - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {sum(w)!r}, expected 1")
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "weights", w)


def overlaps_from_state(psi: StateVector, decomp: SpectralDecomposition) -> SpectralWeights:
    """w_x = |<x|psi>|^2 per eigenvector; degenerate levels keep separate entries."""
    if psi.amps.size != decomp.dim:
        raise ValueError("state dimension does not match the decomposition")
    w = np.abs(decomp.eigenvectors.conj().T @ psi.amps) ** 2
    return SpectralWeights(tuple(decomp.eigenvalues), tuple(w))


def g_given_times(w: SpectralWeights, energy: float, times, product: bool = False) -> float:
    """Score for one fixed time vector.

    Mean form (default): -(1/N) sum_k sum_x w_x cos((E-E_x) t_k).
    Product form: (-1)^N sum_x w_x prod_k cos((E-E_x) t_k).
    """
    times = [float(t) for t in times]
    if not times:
        raise ValueError("empty time vector")
    if product:
        total = 0.0
        for e, wx in zip(w.eigenvalues, w.weights):
            p = 1.0
            for t in times:
                p *= math.cos((energy - e) * t)
            total += wx * p
        return (-1.0) ** len(times) * total
    total = 0.0
    for e, wx in zip(w.eigenvalues, w.weights):
        s = sum(math.cos((energy - e) * t) for t in times)
        total += wx * s / len(times)
    return -total


def gaussian_cosine_average(beta: float, p: GaussianTimeParams) -> float:
    """E[cos(beta t)] for t ~ Normal(tau, d^2): exp(-d^2 beta^2 / 2) cos(beta tau)."""
    return math.exp(-0.5 * (p.d * beta) ** 2) * math.cos(beta * p.tau)


def mean_score(w: SpectralWeights, energy: float, p: GaussianTimeParams,
               n_ancillas: int = 1, product: bool = False) -> float:
    """Gaussian-averaged score hbar(E); the product form raises each level term to N."""
    if n_ancillas < 1:
        raise ValueError("n_ancillas must be >= 1")
    if product:
        total = sum(wx * gaussian_cosine_average(energy - e, p) ** n_ancillas
                    for e, wx in zip(w.eigenvalues, w.weights))
        return (-1.0) ** n_ancillas * total
    return -sum(wx * gaussian_cosine_average(energy - e, p)
                for e, wx in zip(w.eigenvalues, w.weights))


def variance_product(mean_g: float) -> float:
    """Single-shot variance of the +-1-valued product observable: 1 - <g>^2."""
    if abs(mean_g) > 1.0 + 1e-12:
        raise ValueError("mean of a +-1 observable cannot exceed 1 in magnitude")
    return max(0.0, 1.0 - mean_g * mean_g)


def stderr(samples) -> float:
    """Standard error sqrt[(mean(x^2) - mean(x)^2) / n]."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 2:
        raise ValueError("stderr needs at least 2 samples")
    var = float(np.mean(x * x) - np.mean(x) ** 2)
    return math.sqrt(max(0.0, var) / x.size)


# --- model-specific curves ---------------------------------------------------

def one_spin_weights(theta: float, field: float) -> SpectralWeights:
    """Single spin prepared by a theta rotation: cos^2(theta/2) at -B, sin^2 at +B."""
    c2 = math.cos(theta / 2.0) ** 2
    return SpectralWeights((-field, field), (c2, 1.0 - c2))


def one_spin_curve(theta: float, field: float, energy: float, p: GaussianTimeParams) -> float:
    return mean_score(one_spin_weights(theta, field), energy, p)


def two_spin_weights(theta1: float, theta2: float, field: float) -> SpectralWeights:
    """Product state over two spins: four weights at energies (-2B, 0, 0, +2B)."""
    c1 = math.cos(theta1 / 2.0) ** 2
    c2 = math.cos(theta2 / 2.0) ** 2
    s1, s2 = 1.0 - c1, 1.0 - c2
    return SpectralWeights((-2.0 * field, 0.0, 0.0, 2.0 * field),
                           (c1 * c2, c1 * s2, s1 * c2, s1 * s2))


def two_spin_curve(theta1: float, theta2: float, field: float, energy: float,
                   p: GaussianTimeParams) -> float:
    return mean_score(two_spin_weights(theta1, theta2, field), energy, p)


def bell_weights(kind: str, field: float, alpha: float | None = None) -> SpectralWeights:
    """Weights for the maximally and partially entangled two-spin inputs.

    phi+/phi-: half weight on each of -2B and +2B. psi+/psi- and mix-psi: all
    weight inside the degenerate E=0 level, so the response is identical for
    every member of that eigenspace. mix-phi targets level weights cos^2(alpha)
    at -2B and sin^2(alpha) at +2B (the state realizing them is
    cos(alpha)|00> + sin(alpha)|11>).
    """
    two_b = 2.0 * field
    if kind in ("phi+", "phi-"):
        return SpectralWeights((-two_b, two_b), (0.5, 0.5))
    if kind in ("psi+", "psi-", "mix-psi"):
        return SpectralWeights((0.0,), (1.0,))
    if kind == "mix-phi":
        if alpha is None:
            raise ValueError("mix-phi needs the mixing angle alpha")
        c2 = math.cos(alpha) ** 2
        return SpectralWeights((-two_b, two_b), (c2, 1.0 - c2))
    raise ValueError(f"unknown entangled-input kind {kind!r}")


def bell_curve(kind: str, field: float, energy: float, p: GaussianTimeParams,
               alpha: float | None = None) -> float:
    return mean_score(bell_weights(kind, field, alpha), energy, p)


# --- density of states, entropy, inverse temperature -------------------------

_DOS_WEIGHTS = (0.25, 0.25, 0.5)     # two-spin levels -2B, +2B, 0 (0 is doubly degenerate)


def _dos_levels(field: float) -> tuple[float, float, float]:
    return (-2.0 * field, 2.0 * field, 0.0)


def dos(energy: float, field: float, p: GaussianTimeParams) -> float:
    """Gaussian-broadened two-spin density of states, normalized at tau=0.

    Omega(E) = d/sqrt(2 pi) * sum_x (mult_x/4) cos((E-E_x) tau) exp(-d^2 (E-E_x)^2/2)
    """
    pref = p.d / math.sqrt(2.0 * math.pi)
    total = 0.0
    for wx, ex in zip(_DOS_WEIGHTS, _dos_levels(field)):
        de = energy - ex
        total += wx * math.cos(de * p.tau) * math.exp(-0.5 * (p.d * de) ** 2)
    return pref * total


def dos_compact_tau0(energy: float, field: float, d: float) -> float:
    """Equivalent tau=0 closed form: (d/sqrt(2 pi)) (1/2) e^{-d^2 E^2/2} (e^{-2 d^2 B^2} cosh(2 d^2 E B) + 1)."""
    pref = d / math.sqrt(2.0 * math.pi)
    return pref * 0.5 * math.exp(-0.5 * (d * energy) ** 2) * (
        math.exp(-2.0 * (d * field) ** 2) * math.cosh(2.0 * d * d * energy * field) + 1.0
    )


def entropy_tau0(energy: float, field: float, d: float) -> float:
    """S/k_B at tau=0 in the prefactor-free convention:
    -ln 2 - d^2 E^2/2 + ln[e^{-2 d^2 B^2} cosh(2 d^2 B E) + 1].
    """
    return (-math.log(2.0) - 0.5 * (d * energy) ** 2
            + math.log(math.exp(-2.0 * (d * field) ** 2)
                       * math.cosh(2.0 * d * d * field * energy) + 1.0))


def beta_tau0(energy: float, field: float, d: float) -> float:
    """Inverse temperature dS/dE at tau=0: ratio of weighted Gaussian derivatives."""
    num = 0.0
    den = 0.0
    for wx, ex in zip(_DOS_WEIGHTS, _dos_levels(field)):
        de = energy - ex
        g = wx * math.exp(-0.5 * (d * de) ** 2)
        num += g * (-d * d * de)
        den += g
    return num / den


@dataclass(frozen=True)
class DosCurve:
    energies: np.ndarray
    omega: np.ndarray
    entropy: np.ndarray
    beta: np.ndarray


def entropy_and_beta(grid, field: float, d: float) -> DosCurve:
    """Omega, S/k_B, and beta on an energy grid (all at tau=0)."""
    if not d > 0.0:
        raise ValueError("time spread d must be positive")
    g = np.asarray(grid, dtype=np.float64)
    p0 = GaussianTimeParams(0.0, d)
    omega = np.array([dos(e, field, p0) for e in g])
    s = np.array([entropy_tau0(e, field, d) for e in g])
    b = np.array([beta_tau0(e, field, d) for e in g])
    return DosCurve(g, omega, s, b)
