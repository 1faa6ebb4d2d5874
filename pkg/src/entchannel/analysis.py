"""
Observables computed from entanglement spectra.

Everything here is a pure function over immutable records: Renyi and min
entropies, entanglement-energy histograms, spatial power spectra of the
min-entropy with a correlation-length estimate, and Gaussian moment fits
for realization-wise entropy samples. Entropies are in nats internally;
the bits toggle lives on EntropySeries and the CSV writers.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats

__all__ = [
    "EIG_FLOOR",
    "SpectrumRecord",
    "EntropySeries",
    "DOSHistogram",
    "PowerSpectrum",
    "GaussianFit",
    "clamp_spectrum",
    "renyi",
    "min_entropy",
    "dos_histogram",
    "power_spectrum",
    "gaussian_fit",
]

# eigenvalues below this contribute nothing resolvable to any entropy and
# their logs are garbage; they are excluded everywhere (counted by the DOS)
EIG_FLOOR = 1e-15

_CLAMP_TOL = 1e-10
_TRACE_TOL = 1e-8


def clamp_spectrum(vals, tol=_CLAMP_TOL):
    """Zero out small negative eigenvalues; reject significant ones.

    Input order is preserved (callers pass descending spectra).
    """
    vals = np.asarray(vals, dtype=float)
    if vals.size and vals.min() < -tol:
        raise ValueError(f"eigenvalue {vals.min()} below -{tol}")
    return np.where(vals < 0.0, 0.0, vals)


@dataclass(frozen=True)
class SpectrumRecord:
    """Eigenvalues of one ancilla state (equivalently, one cut).

    eigenvalues: sorted descending, nonnegative, summing to 1 within 1e-8.
    step doubles as the cut index in spatial scans.
    """

    step: int
    eigenvalues: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", v)
        if v.size == 0:
            raise ValueError("empty spectrum")
        if v.min() < 0.0:
            raise ValueError("negative eigenvalue; clamp before recording")
        if np.any(np.diff(v) > 0.0):
            raise ValueError("eigenvalues must be sorted descending")
        if abs(v.sum() - 1.0) > _TRACE_TOL:
            raise ValueError(f"spectrum sums to {v.sum()}, not 1")


def _eigs(spec):
    v = spec.eigenvalues if isinstance(spec, SpectrumRecord) else np.asarray(spec, dtype=float)
    return v[v >= EIG_FLOOR]


def renyi(spec, n):
    """Renyi entropy S_n = log(sum lambda^n) / (1 - n), in nats.

    n = 1 is the von Neumann limit -sum lambda log lambda (0 log 0 := 0);
    n = inf routes to `min_entropy`. Eigenvalues below 1e-15 are excluded,
    which matters for n < 1 where they would otherwise dominate.
    """
    if not n > 0:
        raise ValueError(f"Renyi index must be positive, got {n}")
    lam = _eigs(spec)
    if lam.size == 0:
        raise ValueError("spectrum has no eigenvalues above the floor")
    if n == 1:
        return float(-(lam * np.log(lam)).sum())
    if math.isinf(n):
        return min_entropy(spec)
    return float(np.log((lam ** n).sum()) / (1.0 - n))


def min_entropy(spec):
    """S_inf = -log(largest eigenvalue)."""
    lam = _eigs(spec)
    if lam.size == 0:
        raise ValueError("spectrum has no eigenvalues above the floor")
    return float(-np.log(lam.max()))


@dataclass(frozen=True)
class EntropySeries:
    """Per-step entropies for a list of Renyi orders (nats or bits).

    values[i, j] is S_{orders[j]} at steps[i]; math.inf is a valid order.
    """

    steps: np.ndarray
    orders: tuple
    values: np.ndarray
    units: str = "nats"

    @classmethod
    def from_records(cls, records, orders=(1, 2, math.inf)):
        steps = np.array([r.step for r in records])
        values = np.array([[renyi(r, n) for n in orders] for r in records])
        return cls(steps=steps, orders=tuple(orders), values=values)

    def in_units(self, units):
        if units == self.units:
            return self
        if {units, self.units} != {"nats", "bits"}:
            raise ValueError(f"unknown units {units!r}")
        f = 1.0 / math.log(2) if units == "bits" else math.log(2)
        return EntropySeries(self.steps, self.orders, self.values * f, units)


class DOSHistogram(NamedTuple):
    """Binned entanglement energies eps = -log(lambda)."""

    counts: np.ndarray
    edges: np.ndarray
    dropped: int  # eigenvalues below the floor, excluded from the binning


def dos_histogram(records, bins, energy_range):
    """Histogram of eps = -log(lambda) pooled over records.

    Eigenvalues below 1e-15 are dropped and counted separately; energies
    outside `energy_range` simply fall off the histogram.
    """
    if not records:
        raise ValueError("need at least one record")
    kept = []
    dropped = 0
    for r in records:
        v = r.eigenvalues if isinstance(r, SpectrumRecord) else np.asarray(r, dtype=float)
        above = v[v >= EIG_FLOOR]
        dropped += v.size - above.size
        kept.append(above)
    eps = -np.log(np.concatenate(kept))
    counts, edges = np.histogram(eps, bins=bins, range=energy_range)
    return DOSHistogram(counts=counts, edges=edges, dropped=dropped)


class PowerSpectrum(NamedTuple):
    """One-sided normalized power spectrum of a spatial series."""

    k: np.ndarray  # wavenumbers in radians per cut, k[0] = 0
    power: np.ndarray  # sums to 1 (all zero for a constant series)
    xi: float  # correlation length 1/HWHM; inf for a constant series


def power_spectrum(series, smooth=None):
    """Normalized |FFT|^2 of the mean-subtracted series, plus xi = 1/HWHM.

    The returned power is the raw one-sided periodogram normalized to unit
    total. xi is read off a boxcar-smoothed copy (window `smooth`, default
    ~M/128 bins, reflected at the k=0 edge so the zeroed DC bin does not
    bias the peak): the peak height is the smoothed value at the origin,
    and the half-width is the first k where the smoothed power falls to
    half that height, linearly interpolated; xi = 1/HWHM in units of the
    cut spacing. When the spectrum never falls below half (white-noise
    flat), the crossing is censored at the Nyquist edge, xi = 1/pi. A
    constant series has no spectrum: all-zero power, xi = inf.
    """
    x = np.asarray(series, dtype=float)
    m = x.size
    if m < 16:
        raise ValueError(f"need at least 16 points, got {m}")
    x = x - x.mean()
    k = 2 * np.pi * np.fft.rfftfreq(m)
    if np.abs(x).max() < 1e-15:
        return PowerSpectrum(k=k, power=np.zeros(k.size), xi=math.inf)
    p = np.abs(np.fft.rfft(x)) ** 2
    p[0] = 0.0  # exact for a mean-subtracted series; kill roundoff residue
    p /= p.sum()
    if smooth is None:
        smooth = max(9, m // 64) | 1
    body = p[1:]  # s[i] estimates the spectrum at k = 2*pi*(i+1)/m
    pad = smooth // 2
    s = np.convolve(np.pad(body, pad, mode="reflect"), np.ones(smooth) / smooth, mode="valid")
    peak = _zero_k_peak(x, m) / body.size
    # a crossing counts only if the spectrum stays below half for a while;
    # isolated noise dips otherwise bias the width low
    persist = max(1, smooth // 2)
    ok = np.convolve((s <= peak / 2).astype(float), np.ones(persist), mode="valid") >= persist
    below = np.nonzero(ok)[0]
    if below.size == 0 or peak <= 0.0:
        j = float(s.size)  # censored at the Nyquist edge
    else:
        j = float(below[0])
        if j > 0:  # interpolate the crossing between bins j-1 and j
            hi, lo = s[int(j) - 1], s[int(j)]
            j -= (peak / 2 - lo) / (hi - lo) if hi > lo else 0.0
    hwhm = 2 * np.pi * (j + 1.0) / m
    return PowerSpectrum(k=k, power=p, xi=float(1.0 / hwhm))


def _zero_k_peak(x, m):
    """Height of the k=0 spectral peak relative to the white level.

    Raw periodogram bins near the origin are exponential variates, so the
    single-bin estimate is far too noisy to set the half-maximum reliably.
    Instead the peak height 1 + 2*sum_d ac(d) (the zero-frequency spectral
    density over the white level) is summed from the autocorrelation out to
    a self-consistent window: the smallest W with W >= 5 * tau_int(W),
    capped at m // 4.
    """
    c = np.fft.irfft(np.abs(np.fft.rfft(x, 2 * m)) ** 2)[:m] / np.arange(m, 0, -1)
    ac = c[1:] / c[0]
    tau = 1.0
    for w in range(1, m // 4):
        tau = 1.0 + 2.0 * ac[:w].sum()
        if w >= 5 * tau:
            break
    return tau


class GaussianFit(NamedTuple):
    mean: float
    std: float
    skewness: float  # nan when the samples are degenerate


def gaussian_fit(samples):
    """Moments of realization-wise entropy samples: mean, std, skewness.

    Skewness is the bias-corrected sample skewness; its magnitude is the
    Gaussianity report. Degenerate (constant) samples get skewness nan.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 3:
        raise ValueError(f"need at least 3 samples, got {x.size}")
    std = float(x.std(ddof=1))
    if std == 0.0:
        return GaussianFit(mean=float(x.mean()), std=0.0, skewness=math.nan)
    return GaussianFit(
        mean=float(x.mean()),
        std=std,
        skewness=float(stats.skew(x, bias=False)),
    )
