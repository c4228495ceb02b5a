"""Longitudinal force/power balance at the wheels.

With zero road grade the power balance at the wheels is also the rate of
change of the vehicle kinetic energy, which doubles as the availability rate
of the longitudinal-dynamics block: traction power enters, braking, rolling
and drag power leave.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class ChassisParams:
    mass: float  # kg
    frontal_area: float  # m^2
    drag_coeff: float
    roll_coeff: float
    wheel_radius: float  # m
    air_density: float  # kg/m^3
    gravity: float  # m/s^2
    diff_efficiency: float
    gear_ratio: float  # machine speed / wheel speed

    def __post_init__(self):
        positives = (
            self.mass,
            self.frontal_area,
            self.drag_coeff,
            self.roll_coeff,
            self.wheel_radius,
            self.air_density,
            self.gravity,
            self.gear_ratio,
        )
        if any(p <= 0.0 for p in positives):
            raise ValueError("chassis parameters must be positive")
        if self.drag_coeff >= 1.0:
            raise ValueError("drag coefficient must be below 1")
        if self.roll_coeff >= 0.1:
            raise ValueError("rolling coefficient must be below 0.1")
        if not 0.0 < self.diff_efficiency <= 1.0:
            raise ValueError("differential efficiency must be in (0, 1]")


@dataclass
class LongitudinalState:
    v: float = 0.0  # m/s
    x: float = 0.0  # m, diagnostic only

    def __post_init__(self):
        if self.v < 0.0:
            raise ValueError("speed must be nonnegative")


@dataclass(frozen=True)
class PowerTerms:
    """Wheel-level power flows of one step, W. All nonnegative except the
    signed traction term and the net balance ``p_long``."""

    p_trac: float
    p_brake: float
    p_roll: float
    p_aero: float
    p_long: float


def resistive_forces(v, params):
    """(aerodynamic drag, rolling resistance) in N at speed ``v``.

    Rolling resistance is zero at standstill: static friction does no work
    and a constant term would decelerate a parked vehicle.
    """
    if v < 0.0:
        raise ValueError("speed must be nonnegative")
    f_aero = 0.5 * params.frontal_area * params.air_density * params.drag_coeff * v * v
    f_roll = params.mass * params.gravity * params.roll_coeff if v > 0.0 else 0.0
    return f_aero, f_roll


def step_longitudinal(state, f_trac, f_brake, params, dt):
    """Advance speed one explicit-Euler step and report the power terms.

    ``f_trac`` is the signed driveline force (negative while regenerating);
    ``f_brake`` is the friction-brake force and must be nonnegative. Speed is
    clamped at zero. Power terms are evaluated at the entry speed, consistent
    with the explicit update.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if f_brake < 0.0:
        raise ValueError("friction brake force must be nonnegative")
    v = state.v
    f_aero, f_roll = resistive_forces(v, params)
    f_net = f_trac - f_brake - f_roll - f_aero
    v_new = v + dt * f_net / params.mass
    if v_new < 0.0:
        v_new = 0.0
    terms = PowerTerms(
        p_trac=f_trac * v,
        p_brake=f_brake * v,
        p_roll=f_roll * v,
        p_aero=f_aero * v,
        p_long=f_net * v,
    )
    return LongitudinalState(v=v_new, x=state.x + v * dt), terms


def hamiltonian_rate(terms):
    """Availability rate of the longitudinal block: the wheel power balance
    (kinetic-energy derivative; no potential term with zero road grade)."""
    return terms.p_trac - terms.p_brake - terms.p_roll - terms.p_aero
