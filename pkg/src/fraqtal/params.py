"""Measurement statistics to Julia-set parameters."""
from __future__ import annotations

from dataclasses import dataclass

from .quantum import ShotHistogram
from .rng import CMAP_CONST, splitmix64

PALETTE = ("turbo", "viridis", "rainbow", "magma", "plasma")

BASE_C = complex(-0.7, 0.27)
C_SPREAD = 0.06
# cut-points on P(qubit 2 = 1) for exponents 3 and 4
POWER_CUTS = (0.6, 0.85)
# reachable box; the clamp only absorbs last-ulp rounding at p = 0 or 1
C_REAL_RANGE = (-0.76, -0.64)
C_IMAG_RANGE = (0.21, 0.33)


@dataclass(frozen=True)
class JuliaParams:
    c_real: float
    c_imag: float
    power: int
    cmap_name: str

    @property
    def c(self) -> complex:
        return complex(self.c_real, self.c_imag)


def marginal_one_prob(hist: ShotHistogram, qubit: int) -> float:
    """Fraction of shots in which ``qubit`` read 1."""
    n = hist.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    pos = n - 1 - qubit  # strings are most-significant qubit first
    ones = sum(count for key, count in hist.counts.items() if key[pos] == "1")
    return ones / hist.shots


def power_from_marginal(p: float) -> int:
    lo, hi = POWER_CUTS
    if p < lo:
        return 2
    return 3 if p < hi else 4


def cmap_for_seed(seed: int) -> str:
    return PALETTE[splitmix64(seed ^ CMAP_CONST) % len(PALETTE)]


def _clamp(v: float, bounds: tuple[float, float]) -> float:
    return min(max(v, bounds[0]), bounds[1])


def derive_julia_params(hist: ShotHistogram, seed: int) -> JuliaParams:
    if hist.num_qubits < 3:
        raise ValueError("parameter derivation needs at least 3 qubits")
    p0, p1, p2 = (marginal_one_prob(hist, q) for q in range(3))
    return JuliaParams(
        c_real=_clamp(BASE_C.real + C_SPREAD * (2.0 * p0 - 1.0), C_REAL_RANGE),
        c_imag=_clamp(BASE_C.imag + C_SPREAD * (2.0 * p1 - 1.0), C_IMAG_RANGE),
        power=power_from_marginal(p2),
        cmap_name=cmap_for_seed(seed),
    )
