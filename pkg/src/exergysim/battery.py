"""Zero-order equivalent-circuit battery pack.

A cell is an open-circuit voltage source behind a lumped series resistance,
both tabulated against state of charge. Cells are upscaled to a pack by the
series/parallel counts. The pack exchanges no mass, so its availability
changes only through electrical work, heat rejected to the environment, and
Joule destruction.

Sign convention: positive current and power discharge the battery.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import PowerLimitError, StateOfChargeError


@dataclass(frozen=True)
class CellParams:
    q_nom: float  # Ah
    v_nom: float  # V
    soc_bp: np.ndarray  # sorted breakpoints covering [0, 1]
    ocv: np.ndarray  # V at soc_bp
    r0: np.ndarray  # ohm at soc_bp
    heat_capacity: float  # J/K
    heat_transfer: float  # W/K

    def __post_init__(self):
        if self.q_nom <= 0.0 or self.v_nom <= 0.0:
            raise ValueError("cell capacity and nominal voltage must be positive")
        if self.heat_capacity <= 0.0 or self.heat_transfer <= 0.0:
            raise ValueError("cell thermal parameters must be positive")
        bp = np.asarray(self.soc_bp, dtype=np.float64)
        if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0.0):
            raise ValueError("SoC breakpoints must be strictly increasing")
        if bp[0] > 0.0 or bp[-1] < 1.0:
            raise ValueError("SoC breakpoints must cover [0, 1]")
        for name, curve in (("open-circuit voltage", self.ocv), ("resistance", self.r0)):
            arr = np.asarray(curve, dtype=np.float64)
            if arr.shape != bp.shape:
                raise ValueError(f"{name} table must match the SoC breakpoints")
            if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
                raise ValueError(f"{name} must be finite and positive")


@dataclass(frozen=True)
class PackParams:
    """Cell parameters upscaled by the series/parallel configuration."""

    cell: CellParams
    n_s: int
    n_p: int
    v_nom: float  # V
    q_nom: float  # Ah
    e_nom: float  # J
    heat_capacity: float  # J/K
    heat_transfer: float  # W/K
    p_dis_max: float = math.inf  # W, supervisor-facing discharge limit
    p_chg_max: float = math.inf  # W (magnitude), supervisor-facing charge limit

    def ocv(self, soc):
        return self.n_s * kernels.lerp1(soc, self.cell.soc_bp, self.cell.ocv)

    def r0(self, soc):
        return (self.n_s / self.n_p) * kernels.lerp1(soc, self.cell.soc_bp, self.cell.r0)


def upscale(cell, n_s, n_p, p_dis_max=math.inf, p_chg_max=math.inf):
    """Build pack-level parameters from a cell and its series/parallel counts."""
    if n_s < 1 or n_p < 1:
        raise ValueError("series and parallel counts must be at least 1")
    v_nom = n_s * cell.v_nom
    q_nom = n_p * cell.q_nom
    return PackParams(
        cell=cell,
        n_s=n_s,
        n_p=n_p,
        v_nom=v_nom,
        q_nom=q_nom,
        e_nom=v_nom * q_nom * 3600.0,
        heat_capacity=n_s * n_p * cell.heat_capacity,
        heat_transfer=n_s * n_p * cell.heat_transfer,
        p_dis_max=p_dis_max,
        p_chg_max=p_chg_max,
    )


@dataclass(frozen=True)
class BatteryState:
    soc: float
    soe: float
    temp: float  # K
    current: float = 0.0  # A, last applied
    voltage: float = 0.0  # V, last terminal


@dataclass(frozen=True)
class BatteryStepTerms:
    """Per-step rates, W except the entropy generation rate in W/K."""

    x_heat: float  # <= 0
    x_dest: float  # <= 0
    work: float  # -p_batt
    x_batt: float  # x_heat + x_dest + work
    s_gen: float  # >= 0
    joule: float  # >= 0


def solve_current(pack, soc, p_batt):
    """Terminal current and voltage delivering ``p_batt`` at the given SoC.

    Picks the physical (smaller-magnitude) root of P = (V_oc - R0 I) I, so
    discharge gives I > 0 and charge I < 0.
    """
    v_oc = pack.ocv(soc)
    r0 = pack.r0(soc)
    i, v, ok = kernels.battery_current(v_oc, r0, p_batt)
    if not ok:
        raise PowerLimitError(
            f"demand {p_batt:.1f} W exceeds pack capability {v_oc * v_oc / (4.0 * r0):.1f} W"
        )
    return i, v


def step(pack, state, p_batt, ref, dt):
    """Advance SoC, SoE and temperature one step under terminal power
    ``p_batt`` and return the new state with the availability rates.

    The current solved at the entry SoC is held for the whole step (explicit
    scheme). Entropy is generated only by the Joule loss; heat leaves towards
    the environment at the reference temperature.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if state.temp < ref.T0:
        raise ValueError(f"battery temperature {state.temp} K below reference {ref.T0} K")
    i, v = solve_current(pack, state.soc, p_batt)

    soc_new = state.soc - dt * i / (3600.0 * pack.q_nom)
    if not 0.0 <= soc_new <= 1.0:
        kind = "depleted" if soc_new < 0.0 else "overcharged"
        raise StateOfChargeError(f"battery {kind}: SoC would reach {soc_new:.4f}")
    soe_new = state.soe - dt * p_batt / pack.e_nom

    t = state.temp
    joule = pack.r0(state.soc) * i * i
    q_env = pack.heat_transfer * (ref.T0 - t)
    t_new = t + dt * (joule + q_env) / pack.heat_capacity

    carnot = 1.0 - ref.T0 / t
    x_heat = carnot * q_env
    x_dest = -(ref.T0 / t) * joule
    work = -p_batt
    terms = BatteryStepTerms(
        x_heat=x_heat,
        x_dest=x_dest,
        work=work,
        x_batt=x_heat + x_dest + work,
        s_gen=joule / t,
        joule=joule,
    )
    new_state = BatteryState(soc=soc_new, soe=soe_new, temp=t_new, current=i, voltage=v)
    return new_state, terms


def initial_exergy(pack, soc0):
    """Availability stored in the pack at the start of a run, J."""
    if not 0.0 <= soc0 <= 1.0:
        raise ValueError("initial SoC must lie in [0, 1]")
    return soc0 * pack.e_nom
