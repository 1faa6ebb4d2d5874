"""
Exact propagation of the ancilla density matrix.

One channel application R -> sum_s A_s R A_s^dag is performed without ever
materializing the Kraus operators, working from the middle of the staircase
outwards: (1) trace the leading bond digit of R (the eliminated top gate
leaves a closed loop there), (2) apply gate t-1 and its conjugate, whose
carried wires tie the ket and bra sides together, (3) walk the remaining
gates downward, (4) close with gate 1 contracted against the two initial
vectors. Each pass is a small dense contraction, so the cost per step is
O(t q^(2(t-1))).
"""

from dataclasses import dataclass, field

import numpy as np

from .analysis import SpectrumRecord, clamp_spectrum
from .linalg import eigvals_hermitian, haar_vector

__all__ = [
    "AncillaState",
    "init_ancilla",
    "corner_bond_state",
    "apply_channel",
    "apply_channel_matrix",
    "run_exact",
    "run_purity",
    "purity",
]

_STATE_TOL = 1e-10


@dataclass
class AncillaState:
    """Density matrix on the D-dimensional bond space.

    R must be Hermitian with unit trace and spectrum >= -1e-10; `validate`
    checks all three (the eigenvalue check diagonalizes, so it is called at
    construction sites and in tests rather than after every channel step).
    """

    R: np.ndarray
    step: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def D(self):
        return self.R.shape[0]

    def validate(self):
        r = self.R
        if np.abs(r - r.conj().T).max() > _STATE_TOL:
            raise ValueError("ancilla state is not Hermitian")
        if abs(np.trace(r).real - 1.0) > _STATE_TOL:
            raise ValueError(f"ancilla trace {np.trace(r).real} != 1")
        if eigvals_hermitian(r)[-1] < -_STATE_TOL:
            raise ValueError("ancilla state has a significantly negative eigenvalue")
        return self


def init_ancilla(mode, D, rng=None, given=None):
    """Fresh ancilla state: `maximally-mixed`, `random-pure`, or `given`."""
    if mode == "maximally-mixed":
        r = np.eye(D, dtype=complex) / D
    elif mode == "random-pure":
        v = haar_vector(D, rng)
        r = np.outer(v, v.conj())
    elif mode == "given":
        r = np.array(given, dtype=complex)
        if r.shape != (D, D):
            raise ValueError(f"expected shape ({D}, {D}), got {r.shape}")
        return AncillaState(r).validate()
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    return AncillaState(r)


def corner_bond_state(v1, v2, t):
    """Pure bond state left at the edge of the covered region.

    Where no gates act, the lattice is an implicit staircase of identity
    gates over fresh initial vectors, and iterating that identity slice
    converges exactly, in ceil((t-1)/2) steps, to the product bond state
    whose digits alternate v1, v2 from the top. This is the faithful
    starting ancilla when counting channel steps from the edge of a
    circuit, e.g. for convergence transients of Floquet circuits.
    """
    v1, v2 = (np.asarray(v, dtype=complex) for v in (v1, v2))
    w = np.ones(1, dtype=complex)
    for m in range(1, t):  # digit m of t-1, top digit (m = t-1) is v1
        w = np.kron(w, v1 if (t - 1 - m) % 2 == 0 else v2)
    return AncillaState(np.outer(w, w.conj()))


def apply_channel_matrix(k, r):
    """One channel application on a raw (D, D) ndarray; returns (D, D).

    SW-NE slices use the middle-out contraction; other orientations fall
    back to the materialized Kraus sum.
    """
    q, t, D = k.q, k.t, k.D
    if r.shape != (D, D):
        raise ValueError(f"ancilla has shape {r.shape}, slice wants ({D}, {D})")
    if k.orientation != "sw-ne":
        a = k.materialize().reshape(q * q, D, D)
        return np.einsum("sij,jk,slk->il", a, r, a.conj(), optimize=True)
    tensors, (v1, v2) = k._staircase()
    w1 = np.tensordot(np.tensordot(tensors[0], v1, axes=([2], [0])), v2, axes=([2], [0]))
    if t == 1:
        # scalar Kraus operators; the channel is the identity up to norm
        return r * (np.abs(w1) ** 2).sum()
    if t == 2:
        # the carried wire ties w1 directly to its conjugate
        return (w1 @ w1.conj().T) * np.trace(r).real
    tau = t - 1
    x = r.reshape((q,) * (2 * tau))
    x = np.trace(x, axis1=0, axis2=tau)
    names = [f"b{i}" for i in range(2, tau + 1)] + [f"B{i}" for i in range(2, tau + 1)]

    def contract(g, g_axes, targets, new_names):
        nonlocal x, names
        idx = [names.index(nm) for nm in targets]
        x = np.tensordot(g, x, axes=(g_axes, idx))
        names = new_names + [nm for i, nm in enumerate(names) if i not in idx]

    # gate t-1: bottom right eats b_2, carried output ties ket to bra ("y")
    g = tensors[t - 2]
    contract(g, [3], ["b2"], ["a1", "y", "ck"])
    contract(g.conj(), [1, 3], ["y", "B2"], ["A1", "cb"])
    # gates t-2 .. 2: top right plugs into the carried wire above
    for ell in range(t - 2, 1, -1):
        g = tensors[ell - 1]
        dig = t + 1 - ell
        contract(g, [1, 3], ["ck", f"b{dig}"], [f"a{t - ell}", "ck"])
        contract(g.conj(), [1, 3], ["cb", f"B{dig}"], [f"A{t - ell}", "cb"])
    # gate 1 with the initial vectors on its inputs, outer indices fixed
    w1c = w1.conj()
    contract(w1, [1], ["ck"], [f"a{tau}"])
    contract(w1c, [1], ["cb"], [f"A{tau}"])
    perm = [names.index(f"a{i}") for i in range(1, tau + 1)]
    perm += [names.index(f"A{i}") for i in range(1, tau + 1)]
    return x.transpose(perm).reshape(D, D)


def apply_channel(k, r):
    """One channel application on an AncillaState; trace is renormalized
    against accumulated roundoff (the drift per step is ~1e-15)."""
    out = apply_channel_matrix(k, r.R)
    out = (out + out.conj().T) / 2
    out /= np.trace(out).real
    return AncillaState(out, r.step + 1, r.metadata)


def purity(r):
    """tr(R^2) from the Frobenius norm; no diagonalization."""
    m = r.R if isinstance(r, AncillaState) else r
    return float(np.vdot(m, m).real)


def run_exact(source, r0, steps, burn_in, *, record="spectrum"):
    """Drive the channel for `steps` applications, recording after burn-in.

    source : callable step -> KrausSlice
    record : "spectrum" (sorted eigenvalues per step) or "none"

    Returns (records, final_state); records is empty when steps == burn_in.
    """
    if not steps >= burn_in >= 0:
        raise ValueError(f"need steps >= burn_in >= 0, got {steps}, {burn_in}")
    state = r0
    records = []
    for j in range(steps):
        state = apply_channel(source(j), state)
        if j >= burn_in and record == "spectrum":
            eigs = clamp_spectrum(eigvals_hermitian(state.R))
            records.append(SpectrumRecord(step=j, eigenvalues=eigs, metadata=dict(state.metadata)))
    return records, state


def run_purity(source, r0, steps, burn_in):
    """Per-step purities after burn-in (cheap path: no diagonalization)."""
    if not steps >= burn_in >= 0:
        raise ValueError(f"need steps >= burn_in >= 0, got {steps}, {burn_in}")
    state = r0
    out = np.empty(steps - burn_in)
    for j in range(steps):
        state = apply_channel(source(j), state)
        if j >= burn_in:
            out[j - burn_in] = purity(state)
    return out, state
