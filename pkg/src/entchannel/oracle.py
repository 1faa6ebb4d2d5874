"""
Brute-force statevector evolution of finite brickwork circuits.

Ground truth for everything the channel machinery claims: a width-N chain
is evolved layer by layer and its half-cut spectra are compared against
the bond-space density matrix. `slice_grid` lays a list of diagonal
slices onto the finite lattice (identity gates everywhere else, so every
staircase is complete), which makes the comparison exact rather than
asymptotic: the part of the circuit right of the cut is an isometry and
drops out of the reduced spectrum.
"""

from dataclasses import dataclass

import numpy as np

from .gates import ProductState, gate_identity

__all__ = [
    "StateVector",
    "evolve_brickwork",
    "reduced_spectrum",
    "layer_sites",
    "slice_grid",
    "bond_cut",
    "central_slice_index",
]

# amplitudes are capped at 2^16: wide enough for a depth-4 staircase
# comparison on N = 16 sites, still instant to evolve and decompose
_MAX_AMPS = 2 ** 16

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    """Dense state of a finite chain; site 0 is the leftmost (most
    significant) digit of the amplitude index."""

    q: int
    width: int
    amplitudes: np.ndarray

    def validate(self):
        if self.amplitudes.shape != (self.q ** self.width,):
            raise ValueError("amplitude count does not match q^width")
        if abs(np.linalg.norm(self.amplitudes) - 1.0) > _NORM_TOL:
            raise ValueError("state is not normalized")
        return self


def layer_sites(width, layer):
    """Left sites of the gates in one layer (1-based); odd layers start at
    site 0, even layers at site 1, edge sites idle."""
    offset = (layer - 1) % 2
    return list(range(offset, width - 1, 2))


def _apply_gate(psi, q, width, site, tensor):
    left = q ** site
    block = psi.reshape(left, q, q, -1)
    return np.einsum("stij,aijb->astb", tensor, block).reshape(-1)


def evolve_brickwork(init, gates_by_layer, t):
    """Apply t brickwork layers to a product state.

    gates_by_layer[l] lists layer l+1's gates left to right, one per slot
    of `layer_sites`. Returns the final StateVector.
    """
    q, width = init.q, init.width
    if width % 2:
        raise ValueError("width must be even")
    if q ** width > _MAX_AMPS:
        raise ValueError(f"q^width = {q ** width} exceeds the {_MAX_AMPS} guard")
    if len(gates_by_layer) != t:
        raise ValueError(f"expected {t} layers, got {len(gates_by_layer)}")
    psi = np.array([1.0 + 0.0j])
    for v in init.site_vectors:
        psi = np.outer(psi, v).reshape(-1)
    for layer, gates in enumerate(gates_by_layer, start=1):
        sites = layer_sites(width, layer)
        if len(gates) != len(sites):
            raise ValueError(f"layer {layer} wants {len(sites)} gates, got {len(gates)}")
        for site, g in zip(sites, gates):
            psi = _apply_gate(psi, q, width, site, g.tensor)
    return StateVector(q=q, width=width, amplitudes=psi).validate()


def reduced_spectrum(psi, cut):
    """Eigenvalues of the reduced density matrix of the leftmost `cut`
    sites, descending; computed from singular values of the bipartition."""
    if not 1 <= cut < psi.width:
        raise ValueError(f"cut must be in [1, {psi.width - 1}], got {cut}")
    m = psi.amplitudes.reshape(psi.q ** cut, -1)
    s = np.linalg.svd(m, compute_uv=False)
    lam = s ** 2
    if abs(lam.sum() - 1.0) > _NORM_TOL:
        raise ValueError(f"spectrum sums to {lam.sum()}, not 1")
    return lam


def slice_grid(slices, width):
    """Lay diagonal slices onto a finite lattice.

    Slice j's layer-l gate lands on sites (2j + l - 1, 2j + l), its two
    initial vectors on sites (2j, 2j + 1); every other position gets an
    identity gate and every uncovered site starts in |0>. Returns
    (ProductState, gates_by_layer) ready for `evolve_brickwork`.
    """
    if not slices:
        raise ValueError("need at least one slice")
    q, t = slices[0].q, slices[0].t
    if any(sl.q != q or sl.t != t for sl in slices):
        raise ValueError("slices disagree on q or t")
    if any(sl.orientation != "sw-ne" for sl in slices):
        raise ValueError("the grid embedding is defined for SW-NE slices")
    if 2 * (len(slices) - 1) + t > width - 1:
        raise ValueError(f"{len(slices)} slices of depth {t} overrun width {width}")
    ident = gate_identity(q)
    grid = [[ident] * len(layer_sites(width, layer)) for layer in range(1, t + 1)]
    vectors = np.zeros((width, q), dtype=complex)
    vectors[:, 0] = 1.0
    for j, sl in enumerate(slices):
        v1, v2 = sl.init_vectors
        vectors[2 * j], vectors[2 * j + 1] = v1, v2
        for layer, g in enumerate(sl.gates, start=1):
            offset = (layer - 1) % 2
            grid[layer - 1][(2 * j + layer - 1 - offset) // 2] = g
    return ProductState(q=q, site_vectors=vectors), grid


def bond_cut(t, j):
    """Left-block size whose reduced spectrum matches the bond state at the
    left edge of slice j.

    The channel walks the entanglement cut leftward: starting from the pure
    bond state at the right edge of the lattice and consuming slices
    j_last, j_last - 1, ..., j leaves the ancilla on the bond between
    slices j - 1 and j, which bisects the lattice at this site count.
    """
    return 2 * j + t - 1


def central_slice_index(width, t):
    """Slice index whose bond cut lands nearest width/2."""
    return max(1, (width // 2 - t + 2) // 2)
