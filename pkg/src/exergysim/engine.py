"""Quasi-static spark-ignition engine with availability bookkeeping.

Fuel consumption comes from a static map. The availability balance splits
the incoming fuel exergy into shaft work, exhaust flow (chemical plus
physical, from the stoichiometric combustion products), cylinder-wall heat
transfer (time-averaged convective correlation), friction, and a combustion
irreversibility term that closes the balance exactly. Intake air carries a
negligible availability flow and is booked as zero.

The engine is algebraic: in-cylinder and exhaust temperatures are fixed
parameters, so there is no engine thermal state to advance.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import kernels, thermo
from .errors import CalibrationError


class ModelConsistencyWarning(UserWarning):
    """The closure produced a positive combustion term (infeasible process)."""


@dataclass(frozen=True)
class EngineParams:
    tau_bp: np.ndarray  # Nm, fuel-map torque breakpoints
    omega_bp: np.ndarray  # rad/s, fuel-map speed breakpoints
    fuel_map: np.ndarray  # kg/s, shape (len(tau_bp), len(omega_bp))
    x: int  # carbon atoms in the fuel formula CxHy
    y: int  # hydrogen atoms
    lhv: float  # J/kg
    afr_stoich: float
    tank_volume: float  # m^3
    fuel_density: float  # kg/m^3
    bore: float  # m
    displacement: float  # m^3
    t_gas: float  # K, in-cylinder mixture temperature
    t_coolant: float  # K
    conductivity: float  # W/(m K), mixture
    viscosity: float  # kg/(s m), mixture
    heat_a: float  # convective correlation scale factor (calibrated)
    heat_b: float  # convective correlation mass-flow exponent
    t_exhaust: float  # K
    fmep_c0: float  # Pa
    fmep_c1: float  # Pa s/rad
    fmep_c2: float  # Pa (s/rad)^2
    tau_max: float  # Nm
    omega_min: float  # rad/s, lowest sustainable firing speed

    def __post_init__(self):
        if self.x <= 0 or self.y <= 0:
            raise ValueError("fuel formula indices must be positive")
        if not 0.0 < self.heat_b < 1.0:
            raise ValueError("mass-flow exponent must lie in (0, 1)")
        if not self.t_gas > self.t_coolant:
            raise ValueError("in-cylinder temperature must exceed the coolant temperature")
        tau_bp = np.asarray(self.tau_bp, dtype=np.float64)
        omega_bp = np.asarray(self.omega_bp, dtype=np.float64)
        grid = np.asarray(self.fuel_map, dtype=np.float64)
        if np.any(np.diff(tau_bp) <= 0.0) or np.any(np.diff(omega_bp) <= 0.0):
            raise ValueError("fuel-map breakpoints must be strictly increasing")
        if grid.shape != (tau_bp.size, omega_bp.size):
            raise ValueError("fuel-map shape does not match breakpoints")
        if np.any(~np.isfinite(grid)) or np.any(grid < 0.0):
            raise ValueError("fuel rates must be finite and nonnegative")
        positives = (
            self.lhv,
            self.afr_stoich,
            self.fuel_density,
            self.bore,
            self.displacement,
            self.conductivity,
            self.viscosity,
            self.heat_a,
            self.t_exhaust,
            self.tau_max,
            self.omega_min,
        )
        if any(p <= 0.0 for p in positives):
            raise ValueError("engine parameters must be positive")
        if self.tank_volume < 0.0:
            raise ValueError("tank volume must be nonnegative")


@dataclass(frozen=True)
class CombustionStoich:
    """Product bookkeeping of CxHy + z (O2 + 3.76 N2) at stoichiometry."""

    a: float  # mol CO2
    b: float  # mol H2O
    z: float  # mol O2
    c: float  # mol N2
    n_tot: float
    fractions: dict  # restricted-state product molar fractions
    mean_molar_mass: float  # kg/mol of the product mixture


def stoichiometry(x, y):
    """Combustion products of CxHy with all oxygen consumed."""
    if x <= 0 or y <= 0:
        raise ValueError("fuel formula indices must be positive")
    a = float(x)
    b = y / 2.0
    z = a + b / 2.0
    c = 3.76 * z
    n_tot = a + b + c
    fractions = {
        "CO2": a / n_tot,
        "H2O": b / n_tot,
        "N2": c / n_tot,
        "O2": 0.0,
    }
    mean_m = sum(f * thermo.MOLAR_MASS[k] for k, f in fractions.items())
    return CombustionStoich(
        a=a, b=b, z=z, c=c, n_tot=n_tot, fractions=fractions, mean_molar_mass=mean_m
    )


def fuel_exergy_factor(x, y):
    """Ratio of specific fuel chemical availability to its heating value."""
    return 1.04224 + 0.011925 * x / y - 0.0042 / x


def specific_fuel_exergy(params):
    """Chemical availability per kg of fuel, J/kg."""
    return fuel_exergy_factor(params.x, params.y) * params.lhv


def fuel_exergy_rate(params, mdot_fuel):
    """Availability inflow carried by the fuel, W (>= 0)."""
    if mdot_fuel < 0.0:
        raise ValueError("fuel rate must be nonnegative")
    return specific_fuel_exergy(params) * mdot_fuel


def max_fuel_exergy(params):
    """Availability of a full tank, J."""
    return params.tank_volume * params.fuel_density * specific_fuel_exergy(params)


def fuel_rate(params, tau, omega):
    """Fuel consumption at an operating point, kg/s. Zero torque command
    means the engine is off: no idle fuel."""
    if tau <= 0.0:
        return 0.0
    return kernels.bilinear(tau, omega, params.tau_bp, params.omega_bp, params.fuel_map)


def exhaust_exergy_rate(params, stoich, mdot_fuel, species_table, ref):
    """Availability leaving with the exhaust stream, W (<= 0).

    The stream is the stoichiometric product mixture at the configured
    exhaust temperature and ambient pressure; each species carries its
    physical exergy plus the chemical exergy of its restricted-state
    fraction against the atmosphere. Intake availability is neglected.
    """
    if mdot_fuel < 0.0:
        raise ValueError("fuel rate must be nonnegative")
    if mdot_fuel == 0.0:
        return 0.0
    mdot_exh = mdot_fuel * (1.0 + params.afr_stoich)
    n_exh = mdot_exh / stoich.mean_molar_mass
    total = 0.0
    for name, f_star in stoich.fractions.items():
        if f_star == 0.0:
            continue
        sp = species_table[name]
        psi = thermo.chemical_exergy(sp, f_star, ref) + thermo.physical_exergy(
            sp, params.t_exhaust, ref
        )
        total += n_exh * f_star * psi
    return -total


def heat_transfer_rate(params, mdot_fuel):
    """Time-averaged convective heat flow from the burned gas to the
    cylinder walls, W (>= 0)."""
    if mdot_fuel < 0.0:
        raise ValueError("fuel rate must be nonnegative")
    if mdot_fuel == 0.0:
        return 0.0
    b = params.heat_b
    mdot_mix = mdot_fuel * (1.0 + params.afr_stoich)
    area = math.pi * params.bore * params.bore / 4.0
    return (
        params.heat_a
        * (params.conductivity / params.viscosity**b)
        * mdot_mix**b
        * params.bore ** (b - 1.0)
        * area ** (1.0 - b)
        * (params.t_gas - params.t_coolant)
    )


def heat_exergy_rate(params, mdot_fuel, ref):
    """Availability removed from the gas by wall heat transfer, W (<= 0)."""
    return -(1.0 - ref.T0 / params.t_gas) * heat_transfer_rate(params, mdot_fuel)


def friction_exergy_rate(params, omega):
    """Availability destroyed by rubbing and pumping friction, W (<= 0).

    Quadratic friction mean effective pressure over a four-stroke cycle:
    P = FMEP(omega) * V_d * omega / (4 pi).
    """
    if omega < 0.0:
        raise ValueError("engine speed must be nonnegative")
    fmep = params.fmep_c0 + params.fmep_c1 * omega + params.fmep_c2 * omega * omega
    return -fmep * params.displacement * omega / (4.0 * math.pi)


def combustion_closure(x_fuel, x_work, x_exh, x_heat, x_fric):
    """Combustion irreversibility that closes the engine balance, W (<= 0
    for any feasible process; a positive value triggers a warning)."""
    x_comb = -x_fuel - x_work - x_exh - x_heat - x_fric
    if x_comb > 1e-9:
        warnings.warn(
            f"combustion term is positive ({x_comb:.3e} W): infeasible operating point",
            ModelConsistencyWarning,
            stacklevel=2,
        )
    return x_comb


@dataclass(frozen=True)
class EngineStepTerms:
    """Availability rates of one operating point, W, ledger-signed."""

    mdot_fuel: float  # kg/s
    x_fuel: float  # >= 0, inflow
    x_work: float  # <= 0 while producing
    x_exh: float  # <= 0
    x_heat: float  # <= 0
    x_fric: float  # <= 0
    x_comb: float  # <= 0


ENGINE_OFF = EngineStepTerms(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def step(params, stoich, species_table, ref, tau, omega):
    """All availability rates for torque ``tau`` at speed ``omega``.

    A zero (or negative) torque command switches the engine off entirely.
    """
    if tau <= 0.0:
        return ENGINE_OFF
    mdot = fuel_rate(params, tau, omega)
    x_fuel = fuel_exergy_rate(params, mdot)
    x_work = -tau * omega
    x_exh = exhaust_exergy_rate(params, stoich, mdot, species_table, ref)
    x_heat = heat_exergy_rate(params, mdot, ref)
    x_fric = friction_exergy_rate(params, omega)
    x_comb = combustion_closure(x_fuel, x_work, x_exh, x_heat, x_fric)
    return EngineStepTerms(
        mdot_fuel=mdot,
        x_fuel=x_fuel,
        x_work=x_work,
        x_exh=x_exh,
        x_heat=x_heat,
        x_fric=x_fric,
        x_comb=x_comb,
    )


def calibrate_heat_coefficient(params, mdot_samples, ref, target=0.10, rel_tol=1e-9):
    """Scale factor of the convective correlation such that the cycle share
    of wall-heat availability over fuel availability hits ``target``.

    Bisects on the factor; the samples are the fuel rates of the engine-on
    steps of a reference cycle (uniform spacing assumed, which cancels in
    the ratio).
    """
    mdot = np.asarray(mdot_samples, dtype=np.float64)
    mdot = mdot[mdot > 0.0]
    if mdot.size == 0:
        raise CalibrationError("no engine-on samples: the heat/fuel ratio is undefined")

    x_fuel_total = float(np.sum([fuel_exergy_rate(params, m) for m in mdot]))

    def ratio(a):
        trial = _with_heat_a(params, a)
        x_heat_total = float(np.sum([-heat_exergy_rate(trial, m, ref) for m in mdot]))
        return x_heat_total / x_fuel_total

    lo, hi = 1e-6, 1e6
    if not ratio(lo) <= target <= ratio(hi):
        raise CalibrationError(
            f"target ratio {target} not bracketed by scale factors [{lo}, {hi}]"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ratio(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * hi:
            break
    return 0.5 * (lo + hi)


def _with_heat_a(params, a):
    return replace(params, heat_a=a)
