"""
Two-site gate families and product initial states.

All gates are q^2 x q^2 unitaries acting on two q-dimensional sites, with
the computational basis ordered 00, 01, 10, 11 (first site major). Spin
variables a in {+1, -1} map to basis labels as a = 1 - 2*bit, so bit 0 is
spin up. Stochastic constructors take an explicit numpy Generator.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import haar_unitary, kron

__all__ = [
    "Gate",
    "KickedIsingParams",
    "XXZParams",
    "ProductState",
    "gate_haar",
    "gate_conserving",
    "gate_kicked_ising",
    "gate_xxz",
    "gate_identity",
    "gate_swap",
    "make_product_state",
    "make_gate_sampler",
    "GATE_FAMILIES",
]

_UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class Gate:
    """A two-site unitary.

    Attributes
    ----------
    q : int
        Local dimension.
    matrix : (q^2, q^2) complex ndarray
        Unitary to 1e-12. Row index = outputs, column index = inputs,
        both first-site major.
    label : str
        Model tag plus parameters, for manifests and error messages.
    """

    q: int
    matrix: np.ndarray
    label: str = ""

    @property
    def tensor(self):
        """Four-leg view, axes (out1, out2, in1, in2)."""
        q = self.q
        return self.matrix.reshape(q, q, q, q)

    def unitarity_deviation(self):
        u = self.matrix
        return np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()


def _as_gate(q, matrix, label):
    g = Gate(q, np.ascontiguousarray(matrix, dtype=complex), label)
    dev = g.unitarity_deviation()
    if dev > _UNITARY_TOL:
        warnings.warn(f"gate {label!r} deviates from unitarity by {dev:.2e}")
    return g


@dataclass(frozen=True)
class KickedIsingParams:
    """Couplings of the kicked Ising gate: ZZ coupling J, transverse kick b,
    longitudinal fields h1, h2 on the two sites."""

    J: float
    b: float
    h1: float = 0.0
    h2: float = 0.0

    @property
    def self_dual(self):
        """True iff |J| = |b| = pi/4 to 1e-12 (arbitrary h allowed)."""
        return abs(abs(self.J) - np.pi / 4) <= 1e-12 and abs(abs(self.b) - np.pi / 4) <= 1e-12


@dataclass(frozen=True)
class XXZParams:
    """Anisotropy eta (imaginary for the Ising phase) and Trotter step lam."""

    eta: complex
    lam: float

    def __post_init__(self):
        if abs(np.sin(self.eta + self.lam)) < 1e-14:
            raise ValueError(f"sin(eta + lambda) vanishes for eta={self.eta}, lambda={self.lam}")


@dataclass(frozen=True)
class ProductState:
    """A product state over `width` sites, one unit q-vector per site."""

    q: int
    site_vectors: np.ndarray  # (width, q), each row unit norm

    @property
    def width(self):
        return self.site_vectors.shape[0]

    def pair(self, j):
        """Site vectors (v_{2j}, v_{2j+1}) entering the bottom of slice j.

        Indices wrap modulo the stored width, so translation-invariant
        patterns (zeros, neel) can be stored compactly.
        """
        w = self.width
        return self.site_vectors[(2 * j) % w], self.site_vectors[(2 * j + 1) % w]


def gate_haar(q, rng):
    """Haar-random two-site gate."""
    return _as_gate(q, haar_unitary(q * q, rng), f"haar(q={q})")


def gate_conserving(rng, q=2):
    """Random gate conserving total spin-up number (q=2 only).

    Block diagonal in the number sectors {00}, {01, 10}, {11}: a Haar 2x2
    block on the middle sector (drawn first from the stream), then uniform
    phases on the two one-dimensional sectors.
    """
    if q != 2:
        raise ValueError(f"number-conserving gates are implemented for q=2 only, got q={q}")
    mid = haar_unitary(2, rng)
    ph = np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=2))
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = ph[0]
    u[1:3, 1:3] = mid
    u[3, 3] = ph[1]
    return _as_gate(2, u, "conserving(q=2)")


def gate_kicked_ising(p):
    """Kicked Ising two-site gate in the Z basis.

    Entries are
        U_{ab,cd} = -(sin 2b)/2 * exp(-iJ(ab+cd) - i Jd(ac+bd))
                    * exp(-i h1 (a+c)/2 - i h2 (b+d)/2),
    with spins a,b,c,d in {+1,-1} labeling (out1 out2, in1 in2) and the
    dual coupling Jd = -pi/4 - (i/2) log tan b. Equivalent (up to a global
    phase) to sandwiching single-site kicks exp(-ibX) between two diagonal
    Ising half-layers exp(-iJ Z1 Z2 - i(h1 Z1 + h2 Z2)/2).
    """
    if abs(np.sin(2 * p.b)) < 1e-14:
        raise ValueError(f"kick b={p.b} gives a singular gate (sin 2b = 0)")
    jd = -np.pi / 4 - 0.5j * np.log(np.tan(p.b) + 0j)
    s = 1 - 2 * np.arange(2)  # bit -> spin, a = 1 - 2*bit
    a = s[:, None, None, None]
    b = s[None, :, None, None]
    c = s[None, None, :, None]
    d = s[None, None, None, :]
    u = -np.sin(2 * p.b) / 2 * np.exp(
        -1j * p.J * (a * b + c * d)
        - 1j * jd * (a * c + b * d)
        - 1j * p.h1 * (a + c) / 2
        - 1j * p.h2 * (b + d) / 2
    )
    label = f"kicked-ising(J={p.J:.6g}, b={p.b:.6g}, h1={p.h1:.6g}, h2={p.h2:.6g})"
    return _as_gate(2, u.reshape(4, 4), label)


def gate_xxz(p):
    """Trotterized XXZ gate U(eta, lambda).

    Identity on the 00 and 11 sectors; on the {01, 10} sector
    [[sin eta, sin lambda], [sin lambda, sin eta]] / sin(eta + lambda).
    Unitary when eta is imaginary and lambda real; a warning flags other
    parameter choices.
    """
    den = np.sin(p.eta + p.lam)
    al = np.sin(p.eta) / den
    be = np.sin(p.lam) / den
    u = np.eye(4, dtype=complex)
    u[1:3, 1:3] = [[al, be], [be, al]]
    return _as_gate(2, u, f"xxz(eta={p.eta:.6g}, lambda={p.lam:.6g})")


def gate_identity(q=2):
    return Gate(q, np.eye(q * q, dtype=complex), "identity")


def gate_swap(q=2):
    u = np.eye(q * q, dtype=complex).reshape(q, q, q, q).transpose(0, 1, 3, 2).reshape(q * q, q * q)
    return Gate(q, u, "swap")


def make_product_state(tag, q, width, rng=None):
    """Product state generator.

    Tags: `zeros` (all |0>), `neel` (|0>,|1> alternating), `random-bitstring`
    (i.i.d. uniform basis states), `random-product` (i.i.d. Haar single-site
    vectors). The random tags require an rng.
    """
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    vecs = np.zeros((width, q), dtype=complex)
    if tag == "zeros":
        vecs[:, 0] = 1.0
    elif tag == "neel":
        vecs[np.arange(width), np.arange(width) % 2] = 1.0
    elif tag == "random-bitstring":
        vecs[np.arange(width), rng.integers(0, q, size=width)] = 1.0
    elif tag == "random-product":
        g = rng.standard_normal((width, q)) + 1j * rng.standard_normal((width, q))
        vecs = g / np.linalg.norm(g, axis=1, keepdims=True)
    else:
        raise ValueError(f"unknown product-state tag {tag!r}")
    return ProductState(q, vecs)


def make_gate_sampler(model, q, rng, *, J=np.pi / 4, b=np.pi / 4, h=None,
                      h_interval=(0.0, 2 * np.pi), eta=1.5j, lam=0.7):
    """Zero-argument gate sampler for a named family.

    Families: `haar`, `conserving`, `kicked-ising`, `xxz`, `fixed-random`.
    For kicked-ising, h=None draws (h1, h2) i.i.d. uniform on h_interval at
    every call; a pair fixes them. `xxz` and `fixed-random` return the same
    gate on every call (translation invariant); combine any family with
    reuse_gates at the slice-stream level for Floquet circuits.
    """
    if model == "haar":
        return lambda: gate_haar(q, rng)
    if model == "conserving":
        return lambda: gate_conserving(rng, q=q)
    if model == "kicked-ising":
        if h is not None:
            p = KickedIsingParams(J, b, h[0], h[1])
            return lambda: gate_kicked_ising(p)

        def _kim():
            h1, h2 = rng.uniform(*h_interval, size=2)
            return gate_kicked_ising(KickedIsingParams(J, b, h1, h2))

        return _kim
    if model == "xxz":
        g = gate_xxz(XXZParams(eta, lam))
        return lambda: g
    if model == "fixed-random":
        g = gate_haar(q, rng)
        return lambda: g
    raise ValueError(f"unknown gate family {model!r}; choose from {sorted(GATE_FAMILIES)}")


GATE_FAMILIES = ("haar", "conserving", "kicked-ising", "xxz", "fixed-random")
