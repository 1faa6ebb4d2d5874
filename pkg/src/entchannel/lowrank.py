"""
Rank-K truncated propagation of the ancilla state.

One channel step maps a rank-K mixture sum_k lambda_k |v_k><v_k| to the
q^2 K vectors A_s (sqrt(lambda_k) v_k). These span the new state exactly,
so the step rediagonalizes their (q^2 K)-dimensional Gram matrix instead
of anything D-dimensional, keeps the K largest eigenvalues, renormalizes
the trace, and logs the discarded weight. Cost per step is the staircase
application on K columns plus O((q^2 K)^2 D) for the Gram matrix and
O((q^2 K)^3) for its diagonalization.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .analysis import SpectrumRecord, clamp_spectrum
from .exact import AncillaState
from .kraus import KrausSlice  # noqa: F401  (re-exported for type context)
from .linalg import eig_hermitian

__all__ = [
    "LowRankAncilla",
    "truncate",
    "apply_channel_lowrank",
    "run_lowrank",
    "calibrate_rank",
]

# columns whose squared norm falls below this carry no weight a double can
# resolve against the unit trace; they are dropped before the QR polish,
# which would otherwise divide by a ~zero diagonal
_DEAD_COLUMN = 1e-30

_ORTHO_TOL = 1e-10


@dataclass
class LowRankAncilla:
    """Truncated ancilla state sum_k lambda_k |v_k><v_k|.

    eigenvalues: descending, positive, renormalized to unit sum; vectors
    holds the matching orthonormal columns, shape (D, K). `discarded` is
    the weight removed by the most recent truncation, before the
    renormalization that restores the trace.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    step: int = 0
    discarded: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def D(self):
        return self.vectors.shape[0]

    @property
    def K(self):
        return self.vectors.shape[1]

    def purity(self):
        return float((self.eigenvalues ** 2).sum())

    def to_dense(self):
        r = (self.vectors * self.eigenvalues) @ self.vectors.conj().T
        return AncillaState((r + r.conj().T) / 2, self.step, self.metadata)

    def validate(self):
        lam, v = self.eigenvalues, self.vectors
        if lam.size == 0 or lam.min() <= 0:
            raise ValueError("eigenvalues must be positive")
        if abs(lam.sum() - 1.0) > 1e-12:
            raise ValueError(f"eigenvalues sum to {lam.sum()}, not 1")
        if np.abs(v.conj().T @ v - np.eye(self.K)).max() > _ORTHO_TOL:
            raise ValueError("vectors are not orthonormal")
        return self


def _keep_count(lam, K):
    """How many of the descending weights `lam` survive a rank-K cut."""
    n = min(K, int(np.count_nonzero(lam > _DEAD_COLUMN)))
    if n == 0:
        raise ValueError("state has no weight left to keep")
    return n


def truncate(r, K):
    """Keep the K largest eigenvalues and renormalize the trace.

    Accepts a dense AncillaState (diagonalized here) or a LowRankAncilla
    (already diagonal; just sliced). Asking for more rank than is
    available keeps everything and warns.
    """
    if K < 1:
        raise ValueError(f"rank must be >= 1, got {K}")
    if isinstance(r, AncillaState):
        eig = eig_hermitian(r.R)
        lam = clamp_spectrum(eig.eigenvalues)
        vec = eig.eigenvectors
    else:
        lam, vec = r.eigenvalues, r.vectors
    if K > lam.size:
        warnings.warn(f"rank {K} exceeds available {lam.size}; keeping all")
    n = _keep_count(lam, K)
    kept = lam[:n]
    out = LowRankAncilla(
        eigenvalues=kept / kept.sum(),
        vectors=np.ascontiguousarray(vec[:, :n]),
        step=r.step,
        discarded=float(max(lam.sum() - kept.sum(), 0.0)),
        metadata=r.metadata,
    )
    return out


def apply_channel_lowrank(k, r, K=None):
    """One channel step in the low-rank representation; truncates back to
    rank K (default: the input's rank)."""
    if K is None:
        K = r.K
    if r.D != k.D:
        raise ValueError(f"state dimension {r.D} does not match slice {k.D}")
    q = k.q
    legs = k.apply_all_legs(r.vectors * np.sqrt(r.eigenvalues))
    phi = legs.transpose(2, 0, 1, 3).reshape(k.D, q * q * r.K)
    gram = phi.conj().T @ phi
    eig = eig_hermitian(gram)
    n = _keep_count(clamp_spectrum(eig.eigenvalues), K)
    x = phi @ eig.eigenvectors[:, :n]
    lam = np.einsum("ij,ij->j", x.conj(), x).real
    # column norms, not the Gram eigenvalues: they stay nonnegative and
    # accurate for weights near roundoff
    order = np.argsort(-lam, kind="stable")
    x, lam = x[:, order], lam[order]
    vec, rr = np.linalg.qr(x / np.sqrt(lam))
    d = np.diag(rr)
    safe = np.where(np.abs(d) > 0, np.abs(d), 1.0)
    vec = vec * (d / safe)  # undo the QR's per-column phase convention
    total = lam.sum()
    return LowRankAncilla(
        eigenvalues=lam / total,
        vectors=vec,
        step=r.step + 1,
        discarded=float(max(1.0 - total, 0.0)),
        metadata=r.metadata,
    )


def run_lowrank(source, r0, steps, burn_in, *, K=None, record="spectrum"):
    """Low-rank counterpart of `exact.run_exact`; spectra come straight
    from the stored eigenvalues, so recording is essentially free.

    K caps the rank at every step and defaults to r0's rank. Pass it
    explicitly when r0 sits below the cap, e.g. a pure starting state:
    the rank grows by a factor q^2 per step until the cap stops it, and
    without the cap the first truncation would lock the rank at 1.
    """
    if not steps >= burn_in >= 0:
        raise ValueError(f"need steps >= burn_in >= 0, got {steps}, {burn_in}")
    if K is None:
        K = r0.K
    state = r0
    records = []
    for j in range(steps):
        state = apply_channel_lowrank(source(j), state, K)
        if j >= burn_in and record == "spectrum":
            records.append(
                SpectrumRecord(
                    step=j,
                    eigenvalues=state.eigenvalues.copy(),
                    metadata=dict(state.metadata),
                )
            )
    return records, state


def calibrate_rank(evaluate, reference, *, K0=8, K_max=1024, rtol=0.01):
    """Double K until evaluate(K) matches `reference` to within `rtol`.

    evaluate: K -> scalar observable (typically a mean purity). Returns
    (K, value, history) where history lists every (K, value) tried.
    """
    history = []
    K = K0
    while K <= K_max:
        value = evaluate(K)
        history.append((K, value))
        if abs(value - reference) <= rtol * abs(reference):
            return K, value, history
        K *= 2
    raise RuntimeError(
        f"no rank <= {K_max} matched {reference} to {rtol:.1%}: {history}"
    )
