"""
Stochastic unraveling of the channel over physical measurement records.

A trajectory carries one unit vector on the bond space; each step applies
every Kraus leg, samples one of the q^2 physical outcomes with its Born
weight, and renormalizes. Purity estimates come from squared overlaps of
trajectory pairs driven by the same gate stream. Many trajectories step
together as columns of one matrix, so the staircase contraction runs once
per step rather than once per trajectory.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exact import AncillaState

__all__ = [
    "Trajectory",
    "PurityEstimate",
    "step_trajectory",
    "estimate_purity_pairs",
    "estimate_ancilla_ergodic",
]

_WEIGHT_TOL = 1e-10


@dataclass
class Trajectory:
    """One unraveled pure state with its sampling record."""

    psi: np.ndarray
    logp: float = 0.0
    history: Optional[list] = None  # sampled (s1, s2) pairs, if tracked
    length: int = 0


def _step_block(k, states, u):
    """Advance every column of `states` one step under the slice `k`.

    u: one uniform per column, consumed by inverse-CDF sampling. Returns
    (new states, symbol indices s1*q+s2, chosen weights).
    """
    q, n = k.q, states.shape[1]
    y = k.apply_all_legs(states).reshape(q * q, k.D, n)
    w = np.einsum("sdn,sdn->sn", y.conj(), y).real
    total = w.sum(axis=0)
    if total.min() < _WEIGHT_TOL:
        bad = int(total.argmin())
        raise ValueError(f"trajectory {bad} lost all weight (sum {total.min()})")
    if np.abs(total - 1.0).max() > _WEIGHT_TOL:
        raise ValueError("outcome weights do not sum to 1; slice is not left-canonical")
    w /= total
    cum = np.cumsum(w, axis=0)
    s = np.minimum((cum <= u).sum(axis=0), q * q - 1)
    cols = np.arange(n)
    chosen = w[s, cols]
    new = y[s, :, cols].T / np.sqrt(chosen * total)
    return new, s, chosen


def step_trajectory(k, tr, rng):
    """Sample one symbol and advance a single trajectory."""
    new, s, w = _step_block(k, tr.psi[:, None], rng.random(1))
    history = tr.history
    if history is not None:
        history = history + [divmod(int(s[0]), k.q)]
    return Trajectory(
        psi=new[:, 0],
        logp=tr.logp + float(np.log(w[0])),
        history=history,
        length=tr.length + 1,
    )


@dataclass
class PurityEstimate:
    """Pairwise-fidelity purity estimate, resolved by trajectory length.

    fidelities[i, l] is pair i's squared overlap after l+1 steps; mean and
    stderr are its per-length statistics over pairs.
    """

    lengths: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    fidelities: np.ndarray

    def averaged(self, burn_in=0):
        """Time-averaged estimate over lengths > burn_in.

        Averages within each pair first, so the cross-pair scatter gives
        an honest standard error despite correlations along a trajectory.
        """
        f = self.fidelities[:, burn_in:].mean(axis=1)
        return float(f.mean()), float(f.std(ddof=1) / np.sqrt(f.size))


def estimate_purity_pairs(source, psi0, L, n_pairs, rng, *, chunk=256):
    """Evolve n_pairs trajectory pairs under one shared slice stream and
    record the pairwise fidelity |<psi_a|psi_b>|^2 at every length 1..L.

    psi0: unit bond vector every trajectory starts from. Columns advance
    in blocks of `chunk` pairs to bound the contraction workspace; the
    uniforms are drawn for all columns up front, so the chunking does not
    change what a fixed seed produces.
    """
    if n_pairs < 1:
        raise ValueError("need at least one pair")
    psi0 = np.asarray(psi0, dtype=complex)
    states = np.tile(psi0[:, None], (1, 2 * n_pairs))
    fid = np.empty((n_pairs, L))
    for step in range(L):
        k = source(step)
        u = rng.random(2 * n_pairs)
        for lo in range(0, 2 * n_pairs, 2 * chunk):
            hi = min(lo + 2 * chunk, 2 * n_pairs)
            states[:, lo:hi], _, _ = _step_block(k, states[:, lo:hi], u[lo:hi])
        ov = np.einsum("di,di->i", states[:, 0::2].conj(), states[:, 1::2])
        fid[:, step] = np.abs(ov) ** 2
    mean = fid.mean(axis=0)
    stderr = fid.std(axis=0, ddof=1) / np.sqrt(n_pairs) if n_pairs > 1 else np.zeros(L)
    return PurityEstimate(
        lengths=np.arange(1, L + 1),
        mean=mean,
        stderr=stderr,
        fidelities=fid,
    )


def estimate_ancilla_ergodic(k, psi0, L, rng, burn_in=None):
    """Time-average |psi_l><psi_l| along one long trajectory of the fixed
    slice `k` (translation-invariant circuits only)."""
    if burn_in is None:
        burn_in = 2 * k.t
    if not L > burn_in >= 0:
        raise ValueError(f"need L > burn_in >= 0, got {L}, {burn_in}")
    psi = np.asarray(psi0, dtype=complex)[:, None]
    acc = np.zeros((k.D, k.D), dtype=complex)
    for step in range(L):
        psi, _, _ = _step_block(k, psi, rng.random(1))
        if step >= burn_in:
            acc += psi[:, 0, None] * psi[:, 0].conj()
    return AncillaState(acc / (L - burn_in), step=L)
