"""Map-based interior-permanent-magnet traction machine.

Power conversion between the DC bus and the shaft uses a static efficiency
map. Heat generation and entropy, by contrast, come from a physical loss
model (copper, iron hysteresis, friction) evaluated at the minimum-current
operating point for the commanded torque; the two accountings are
intentionally separate, so the conversion loss shows up in the powertrain
ledger while the physical losses drive the thermal state and the
destruction term.

The machine exchanges no work in its own availability balance: its input
power is billed to the battery and its output power to the wheels.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

#: copper/iron mass fractions used to mix the thermal properties
COPPER_MASS_FRACTION = 0.15
IRON_MASS_FRACTION = 0.85


@dataclass(frozen=True)
class MotorParams:
    count: int  # identical machines sharing the demand equally
    tau_bp: np.ndarray  # Nm, efficiency-map torque breakpoints (>= 0)
    omega_bp: np.ndarray  # rad/s, efficiency-map speed breakpoints
    eff: np.ndarray  # efficiency grid, shape (len(tau_bp), len(omega_bp))
    tau_max: float  # Nm, per machine
    p_max: float  # W, per machine
    r_s0: float  # ohm, stator resistance at the reference temperature
    xi: float  # 1/K, fractional resistance increase per kelvin
    l_d: float  # H
    l_q: float  # H
    lambda_pm: float  # Wb
    n_pp: int
    k_h: float  # iron-loss coefficient
    k_f: float  # W/(rad/s)^2
    c_copper: float  # J/K
    c_iron: float  # J/K
    h_copper: float  # W/K
    h_iron: float  # W/K
    alpha: float = COPPER_MASS_FRACTION
    beta: float = IRON_MASS_FRACTION

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("motor count must be at least 1")
        tau_bp = np.asarray(self.tau_bp, dtype=np.float64)
        omega_bp = np.asarray(self.omega_bp, dtype=np.float64)
        eff = np.asarray(self.eff, dtype=np.float64)
        if tau_bp.size < 2 or omega_bp.size < 2:
            raise ValueError("efficiency map needs at least a 2x2 grid")
        if np.any(np.diff(tau_bp) <= 0.0) or np.any(np.diff(omega_bp) <= 0.0):
            raise ValueError("map breakpoints must be strictly increasing")
        if eff.shape != (tau_bp.size, omega_bp.size):
            raise ValueError("efficiency grid shape does not match breakpoints")
        if np.any(~np.isfinite(eff)) or np.any(eff <= 0.0) or np.any(eff > 1.0):
            raise ValueError("efficiencies must lie in (0, 1]")
        positives = (
            self.tau_max,
            self.p_max,
            self.r_s0,
            self.xi,
            self.l_d,
            self.l_q,
            self.lambda_pm,
            self.n_pp,
            self.k_h,
            self.k_f,
            self.c_copper,
            self.c_iron,
            self.h_copper,
            self.h_iron,
        )
        if any(p <= 0.0 for p in positives):
            raise ValueError("motor parameters must be positive")

    @property
    def heat_capacity(self):
        return self.alpha * self.c_copper + self.beta * self.c_iron

    @property
    def heat_transfer(self):
        return self.alpha * self.h_copper + self.beta * self.h_iron

    @property
    def lambda_eff(self):
        """Flux linkage as it enters the iron-loss expression."""
        return math.sqrt(1.5) * self.lambda_pm


@dataclass(frozen=True)
class MotorState:
    temp: float  # K
    i_d: float = 0.0  # A, last operating point
    i_q: float = 0.0
    losses: float = 0.0  # W, last total physical loss


@dataclass(frozen=True)
class MotorStepTerms:
    """Per-machine rates: availability in W, entropy generation in W/K."""

    x_heat: float  # <= 0
    x_dest: float  # <= 0
    x_mot: float  # x_heat + x_dest (no work term)
    s_gen: float  # >= 0
    p_copper: float
    p_iron: float
    p_fric: float


def map_efficiency(params, tau, omega):
    """Bilinear efficiency lookup at (|tau|, omega), clamped to the grid."""
    return kernels.bilinear(abs(tau), omega, params.tau_bp, params.omega_bp, params.eff)


def shaft_power(params, p_batt_side, tau, omega, i_sign):
    """Mechanical power for a given DC-side power and battery current sign.

    Discharging (``i_sign > 0``) multiplies by the map efficiency, charging
    divides; at standstill the machine can hold torque but converts no power.
    """
    if omega < 0.0:
        raise ValueError("shaft speed must be nonnegative")
    if omega == 0.0 or p_batt_side == 0.0:
        return 0.0
    tau_eff = min(abs(tau), params.tau_max)
    eta = map_efficiency(params, tau_eff, omega)
    if i_sign > 0:
        return p_batt_side * eta
    if i_sign < 0:
        return p_batt_side / eta
    return p_batt_side


def battery_power(params, tau, omega):
    """DC-side power required to put torque ``tau`` on the shaft at
    ``omega`` (inverse of :func:`shaft_power`)."""
    p_mot = tau * omega
    if p_mot == 0.0:
        return 0.0
    eta = map_efficiency(params, tau, omega)
    return p_mot / eta if p_mot > 0.0 else p_mot * eta


def mtpa_currents(params, tau_req, tol=1e-12, max_iter=200):
    """Minimum-magnitude (i_d, i_q) pair delivering ``tau_req``."""
    if abs(tau_req) > params.tau_max * (1.0 + 1e-12):
        raise ValueError(f"torque {tau_req} Nm exceeds the machine limit {params.tau_max} Nm")
    i_d, i_q, ok = kernels.mtpa_currents(
        tau_req, params.l_d, params.l_q, params.lambda_pm, params.n_pp, tol, max_iter
    )
    if not ok:
        raise ArithmeticError(f"current search did not converge for {tau_req} Nm")
    return i_d, i_q


def torque_from_currents(params, i_d, i_q):
    return kernels.machine_torque(i_d, i_q, params.l_d, params.l_q, params.lambda_pm, params.n_pp)


def step(params, state, tau, omega, ref, dt):
    """Advance the thermal state of one machine and return its availability
    rates for torque ``tau`` at speed ``omega``.

    The balance has no work term; the exergy rate is heat transfer plus
    destruction, which must add up to the full balance identically.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if state.temp < ref.T0:
        raise ValueError(f"motor temperature {state.temp} K below reference {ref.T0} K")
    i_d, i_q = mtpa_currents(params, tau)
    t = state.temp
    r_s = params.r_s0 * (1.0 + params.xi * (t - ref.T0))
    p_copper, p_iron, p_fric = kernels.motor_loss_terms(
        i_d, i_q, omega, r_s, params.k_h, params.k_f, params.l_d, params.l_q, params.lambda_eff
    )
    p_loss = p_copper + p_iron + p_fric

    q_env = params.heat_transfer * (ref.T0 - t)
    t_new = t + dt * (q_env + p_loss) / params.heat_capacity

    x_heat = (1.0 - ref.T0 / t) * q_env
    x_dest = -(ref.T0 / t) * p_loss
    terms = MotorStepTerms(
        x_heat=x_heat,
        x_dest=x_dest,
        x_mot=x_heat + x_dest,
        s_gen=p_loss / t,
        p_copper=p_copper,
        p_iron=p_iron,
        p_fric=p_fric,
    )
    return MotorState(temp=t_new, i_d=i_d, i_q=i_q, losses=p_loss), terms
