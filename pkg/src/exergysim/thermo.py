"""Dead-state definition and the thermodynamic primitives shared by all
powertrain components: Carnot heat-transfer availability, per-species
chemical and physical exergy of ideal-gas streams, and gas property
evaluation from tabulated 7-coefficient polynomials.

Conventions
-----------
* Temperatures in K, pressures in Pa, molar quantities in J/mol.
* The dead state temperature ``T0`` is a lower bound for every component
  temperature; heat always leaves the system, so heat-transfer exergy terms
  are negative.
* A species absent from a stream (zero molar fraction) contributes zero
  chemical exergy; the logarithmic expression is never evaluated at 0.
"""

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import kernels
from .errors import InputParseError

R_GAS = kernels.GAS_CONSTANT  # J/(mol K)

# standard atomic-weight based molar masses, kg/mol
MOLAR_MASS = {
    "N2": 28.0134e-3,
    "O2": 31.9988e-3,
    "H2O": 18.01528e-3,
    "CO2": 44.0095e-3,
}

#: dry-air-with-humidity composition used as the default dead state
STANDARD_ATMOSPHERE = {
    "N2": 0.7567,
    "O2": 0.2035,
    "CO2": 0.0003,
    "H2O": 0.0303,
    "others": 0.0092,
}

T0_DEFAULT = 298.15  # K
P0_DEFAULT = 101325.0  # Pa


@dataclass(frozen=True)
class ReferenceState:
    """Dead state: temperature, pressure, and atmospheric molar fractions."""

    T0: float = T0_DEFAULT
    P0: float = P0_DEFAULT
    fractions: dict = field(default_factory=lambda: dict(STANDARD_ATMOSPHERE))

    def __post_init__(self):
        if self.T0 <= 0.0 or self.P0 <= 0.0:
            raise ValueError("reference temperature and pressure must be positive")
        total = sum(self.fractions.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"reference molar fractions sum to {total!r}, not 1")
        for name, f in self.fractions.items():
            if f <= 0.0:
                raise ValueError(f"reference fraction of {name} must be positive")

    def fraction(self, species_name):
        try:
            return self.fractions[species_name]
        except KeyError:
            raise ValueError(f"species {species_name!r} not part of the reference state") from None


@dataclass(frozen=True)
class Species:
    """Ideal-gas species with two-range 7-coefficient property polynomials."""

    name: str
    molar_mass: float  # kg/mol
    t_min: float
    t_split: float
    t_max: float
    coeffs_low: np.ndarray
    coeffs_high: np.ndarray

    def __post_init__(self):
        if self.molar_mass <= 0.0:
            raise ValueError(f"{self.name}: molar mass must be positive")
        if not (self.t_min < self.t_split < self.t_max):
            raise ValueError(f"{self.name}: temperature ranges are inconsistent")
        # the two fits must agree at the split temperature
        for fn, label in ((kernels.gas_enthalpy, "enthalpy"), (kernels.gas_entropy, "entropy")):
            lo = fn(self.t_split, self.coeffs_low, self.coeffs_high, self.t_max)
            hi = fn(self.t_split, self.coeffs_low, self.coeffs_high, self.t_min)
            if abs(lo - hi) > 1e-3 * abs(hi):
                raise ValueError(f"{self.name}: {label} fit discontinuous at {self.t_split} K")


def _check_range(species, t):
    if not (species.t_min <= t <= species.t_max):
        raise ValueError(
            f"{species.name}: T={t} K outside polynomial validity "
            f"[{species.t_min}, {species.t_max}] K"
        )


def gas_cp(species, t):
    """Molar heat capacity at constant pressure, J/(mol K)."""
    _check_range(species, t)
    return kernels.gas_cp(t, species.coeffs_low, species.coeffs_high, species.t_split)


def gas_enthalpy(species, t):
    """Molar enthalpy (including formation enthalpy), J/mol."""
    _check_range(species, t)
    return kernels.gas_enthalpy(t, species.coeffs_low, species.coeffs_high, species.t_split)


def gas_entropy(species, t):
    """Standard-pressure molar entropy, J/(mol K)."""
    _check_range(species, t)
    return kernels.gas_entropy(t, species.coeffs_low, species.coeffs_high, species.t_split)


def carnot_factor(t, ref):
    """Fraction of heat at temperature ``t`` convertible to work: 1 - T0/t."""
    if t <= 0.0:
        raise ValueError(f"temperature must be positive, got {t}")
    if t < ref.T0:
        raise ValueError(f"T={t} K below the reference temperature {ref.T0} K")
    return 1.0 - ref.T0 / t


def heat_exergy_rate(qdot, t, ref):
    """Availability carried by a heat flow ``qdot`` at surface temperature ``t``.

    The sign follows ``qdot``: heat leaving the system (negative) removes
    availability.
    """
    return carnot_factor(t, ref) * qdot


def chemical_exergy(species, f_star, ref):
    """Chemical availability of one mole of ``species`` at stream fraction
    ``f_star`` relative to its dead-state fraction, J/mol.

    Zero stream fraction means the species is absent and contributes nothing.
    """
    if f_star < 0.0:
        raise ValueError("molar fraction must be nonnegative")
    if f_star == 0.0:
        return 0.0
    return R_GAS * ref.T0 * np.log(f_star / ref.fraction(species.name))


def physical_exergy(species, t, ref):
    """Work potential of one mole of ``species`` between temperature ``t``
    and the restricted state at ``T0`` (stream assumed at ``P0``), J/mol."""
    _check_range(species, t)
    _check_range(species, ref.T0)
    h = kernels.gas_enthalpy(t, species.coeffs_low, species.coeffs_high, species.t_split)
    h0 = kernels.gas_enthalpy(ref.T0, species.coeffs_low, species.coeffs_high, species.t_split)
    s = kernels.gas_entropy(t, species.coeffs_low, species.coeffs_high, species.t_split)
    s0 = kernels.gas_entropy(ref.T0, species.coeffs_low, species.coeffs_high, species.t_split)
    return h - h0 - ref.T0 * (s - s0)


def load_species_table(path=None):
    """Parse the shipped (or a user-provided) gas property coefficient table.

    The file is comma-delimited with one row per temperature range:
    ``species, t_low, t_high, a1..a7``. Each species needs exactly two rows
    whose ranges join at the split temperature.
    """
    if path is None:
        path = resources.files("exergysim").joinpath("data/gas_polynomials.csv")
    rows = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 10:
                raise InputParseError(
                    f"expected 10 columns, got {len(parts)}", path=str(path), line=lineno
                )
            name = parts[0]
            try:
                values = [float(p) for p in parts[1:]]
            except ValueError as exc:
                raise InputParseError(str(exc), path=str(path), line=lineno) from None
            rows.setdefault(name, []).append(values)

    table = {}
    for name, ranges in rows.items():
        if len(ranges) != 2:
            raise InputParseError(
                f"species {name} needs exactly two temperature ranges, got {len(ranges)}",
                path=str(path),
            )
        ranges.sort(key=lambda r: r[0])
        (t_min, t_split_a, *low), (t_split_b, t_max, *high) = ranges
        if t_split_a != t_split_b:
            raise InputParseError(
                f"species {name}: ranges do not join ({t_split_a} vs {t_split_b})",
                path=str(path),
            )
        if name not in MOLAR_MASS:
            raise InputParseError(f"unknown species {name}", path=str(path))
        table[name] = Species(
            name=name,
            molar_mass=MOLAR_MASS[name],
            t_min=t_min,
            t_split=t_split_a,
            t_max=t_max,
            coeffs_low=np.asarray(low, dtype=np.float64),
            coeffs_high=np.asarray(high, dtype=np.float64),
        )
    return table
