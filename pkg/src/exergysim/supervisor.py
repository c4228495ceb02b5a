"""Driver speed tracking and power-path dispatch.

The driver is a PI regulator on speed error producing a signed wheel-force
demand. Dispatch maps that demand onto the actuators:

* EV: demand split equally across the identical machines, regenerative
  braking first, friction brakes for the remainder.
* HEV: traction demand solved by an instantaneous equivalent-consumption
  search over a motor-torque grid (engine-off candidate always included);
  braking is regen-first with the engine off.

Dispatch saturates gracefully: delivered force equals demand unless an
actuator or battery limit binds.
"""

from dataclasses import dataclass

from . import dynamics, kernels, motor
from .errors import ConfigError


@dataclass(frozen=True)
class DriverParams:
    kp: float  # N/(m/s)
    ki: float  # N/m
    f_trac_max: float  # N
    f_brake_max: float  # N

    def __post_init__(self):
        if self.kp < 0.0 or self.ki < 0.0:
            raise ValueError("driver gains must be nonnegative")
        if self.f_trac_max <= 0.0 or self.f_brake_max <= 0.0:
            raise ValueError("driver force limits must be positive")


@dataclass(frozen=True)
class DriverState:
    integral: float = 0.0  # m, accumulated speed error


def driver_step(target_v, actual_v, params, state, dt):
    """PI speed regulator with conditional anti-windup.

    Returns ``(force_demand, new_state)``; positive demand asks for
    traction, negative for braking. The integrator freezes while the output
    saturates.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    err = target_v - actual_v
    integral_new = state.integral + err * dt
    raw = params.kp * err + params.ki * integral_new
    if raw > params.f_trac_max:
        return params.f_trac_max, state
    if raw < -params.f_brake_max:
        return -params.f_brake_max, state
    return raw, DriverState(integral=integral_new)


@dataclass(frozen=True)
class EcmsParams:
    s_discharge: float = 2.8  # fuel-equivalence factor while discharging
    s_charge: float = 2.2  # fuel-equivalence factor while charging
    soc_ref: float = 0.5
    k_soc: float = 10.0  # proportional charge-sustaining gain
    n_candidates: int = 41
    soc_regen_max: float = 0.60  # regen disabled above this SoC

    def __post_init__(self):
        if self.s_discharge <= 0.0 or self.s_charge <= 0.0:
            raise ValueError("equivalence factors must be positive")
        if not 0.0 < self.soc_ref < 1.0:
            raise ValueError("SoC reference must lie in (0, 1)")
        if self.n_candidates < 3:
            raise ValueError("candidate grid needs at least 3 points")


@dataclass(frozen=True)
class DispatchCommand:
    """Actuator set-points for one step."""

    tau_mot: float  # Nm per machine (negative while regenerating)
    tau_eng: float  # Nm
    f_trac: float  # N, signed driveline force delivered at the wheels
    f_brake: float  # N, friction brake force
    p_batt: float  # W, battery terminal power

    @property
    def f_total(self):
        return self.f_trac - self.f_brake


COAST = DispatchCommand(0.0, 0.0, 0.0, 0.0, 0.0)

_V_REGEN_MIN = 0.1  # m/s, below this all braking is friction
_EV_SOC_REGEN_MAX = 0.98


def machine_speed(v, chassis):
    return v * chassis.gear_ratio / chassis.wheel_radius


def _torque_cap(mot, omega):
    if omega > 0.0:
        return min(mot.tau_max, mot.p_max / omega)
    return mot.tau_max


def _battery_capability(pack, soc):
    v_oc = pack.ocv(soc)
    return 0.999 * v_oc * v_oc / (4.0 * pack.r0(soc))


def _max_feasible_torque(mot, omega, tau_hi, p_limit):
    """Largest per-machine torque in [0, tau_hi] whose total DC draw stays
    within ``p_limit``; 60-split bisection, deterministic."""
    if mot.count * motor.battery_power(mot, tau_hi, omega) <= p_limit:
        return tau_hi
    lo, hi = 0.0, tau_hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mot.count * motor.battery_power(mot, mid, omega) <= p_limit:
            lo = mid
        else:
            hi = mid
    return lo


def ev_dispatch(f_dem, v, chassis, mot, pack, soc, dt):
    """Map a signed wheel-force demand onto the EV actuators."""
    if f_dem >= 0.0:
        return _traction_electric(f_dem, v, chassis, mot, pack, soc)
    return _brake_split(-f_dem, v, chassis, mot, pack, soc, dt, _EV_SOC_REGEN_MAX)


def _traction_electric(f_dem, v, chassis, mot, pack, soc):
    if f_dem == 0.0:
        return COAST
    omega = machine_speed(v, chassis)
    tau_req = f_dem * chassis.wheel_radius / (chassis.gear_ratio * chassis.diff_efficiency)
    tau_per = min(tau_req / mot.count, _torque_cap(mot, omega))
    p_limit = min(pack.p_dis_max, _battery_capability(pack, soc))
    tau_per = _max_feasible_torque(mot, omega, tau_per, p_limit)
    p_batt = mot.count * motor.battery_power(mot, tau_per, omega)
    f_trac = (
        tau_per
        * mot.count
        * chassis.gear_ratio
        * chassis.diff_efficiency
        / chassis.wheel_radius
    )
    return DispatchCommand(tau_mot=tau_per, tau_eng=0.0, f_trac=f_trac, f_brake=0.0, p_batt=p_batt)


def _brake_split(b_dem, v, chassis, mot, pack, soc, dt, soc_regen_max):
    """Regen-first split of a braking force demand ``b_dem > 0``."""
    f_aero, f_roll = dynamics.resistive_forces(v, chassis)
    b_stop = chassis.mass * v / dt - f_roll - f_aero  # stronger braking would reverse
    b_dem = min(b_dem, max(b_stop, 0.0))
    if b_dem <= 0.0:
        return COAST

    omega = machine_speed(v, chassis)
    tau_per = 0.0
    p_batt = 0.0
    if v > _V_REGEN_MIN and soc < soc_regen_max:
        tau_req = b_dem * chassis.wheel_radius * chassis.diff_efficiency / chassis.gear_ratio
        tau_mag = min(tau_req / mot.count, _torque_cap(mot, omega))
        p_limit = min(pack.p_chg_max, _battery_capability(pack, soc))
        tau_mag = _max_feasible_regen(mot, omega, tau_mag, p_limit)
        tau_per = -tau_mag
        p_batt = mot.count * motor.battery_power(mot, tau_per, omega)
    f_trac = (
        tau_per
        * mot.count
        * chassis.gear_ratio
        / (chassis.wheel_radius * chassis.diff_efficiency)
    )
    f_brake = max(b_dem + f_trac, 0.0)  # f_trac <= 0 covers part of the demand
    return DispatchCommand(
        tau_mot=tau_per, tau_eng=0.0, f_trac=f_trac, f_brake=f_brake, p_batt=p_batt
    )


def _max_feasible_regen(mot, omega, tau_hi, p_chg_limit):
    """Largest regen torque magnitude whose charging power stays within the
    limit (magnitude); 60-split bisection."""
    if -mot.count * motor.battery_power(mot, -tau_hi, omega) <= p_chg_limit:
        return tau_hi
    lo, hi = 0.0, tau_hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if -mot.count * motor.battery_power(mot, -mid, omega) <= p_chg_limit:
            lo = mid
        else:
            hi = mid
    return lo


def ecms_split(f_dem, v, soc, chassis, mot, eng, pack, ecms):
    """Instantaneous fuel-plus-weighted-electric cost minimization over a
    discrete motor-torque grid for a traction demand ``f_dem >= 0``.

    The equivalence factors are modulated proportionally around the SoC
    reference for charge-sustaining operation. Falls back to a saturating
    split when no candidate can deliver the demand exactly.
    """
    if f_dem < 0.0:
        raise ValueError("ecms_split handles traction demands only")
    if mot.count != 1:
        raise ConfigError("the hybrid dispatch assumes a single electric machine")
    if f_dem == 0.0 and v == 0.0:
        return COAST

    omega = machine_speed(v, chassis)
    tau_dem = f_dem * chassis.wheel_radius / (chassis.gear_ratio * chassis.diff_efficiency)
    soc_bias = 1.0 + ecms.k_soc * (ecms.soc_ref - soc)
    s_dis_eff = max(ecms.s_discharge * soc_bias, 1e-3)
    s_chg_eff = max(ecms.s_charge * soc_bias, 1e-3)
    v_oc = pack.ocv(soc)
    r0 = pack.r0(soc)
    capability = _battery_capability(pack, soc)
    p_dis = min(pack.p_dis_max, capability)
    # hard charge cutoff above the regen ceiling keeps the pack in its band
    p_chg = pack.p_chg_max if soc < ecms.soc_regen_max else 0.0

    found, _idx, tau_eng, tau_mot, p_batt, _mdot = kernels.ecms_sweep(
        tau_dem,
        omega,
        v_oc,
        r0,
        s_dis_eff,
        s_chg_eff,
        eng.lhv,
        mot.tau_max,
        mot.p_max,
        p_dis,
        p_chg,
        eng.tau_max,
        eng.omega_min,
        mot.tau_bp,
        mot.omega_bp,
        mot.eff,
        eng.tau_bp,
        eng.omega_bp,
        eng.fuel_map,
        ecms.n_candidates,
    )
    if not found:
        tau_mot = _max_feasible_torque(mot, omega, _torque_cap(mot, omega), p_dis)
        tau_mot = min(tau_mot, tau_dem)
        tau_left = tau_dem - tau_mot
        tau_eng = min(tau_left, eng.tau_max) if omega >= eng.omega_min else 0.0
        p_batt = motor.battery_power(mot, tau_mot, omega)

    f_trac = (
        (tau_mot + tau_eng)
        * chassis.gear_ratio
        * chassis.diff_efficiency
        / chassis.wheel_radius
    )
    return DispatchCommand(
        tau_mot=tau_mot, tau_eng=tau_eng, f_trac=f_trac, f_brake=0.0, p_batt=p_batt
    )


def hev_dispatch(f_dem, v, soc, chassis, mot, eng, pack, ecms, dt):
    """Full HEV dispatch: cost-optimal split for traction, regen-first
    braking with the engine off."""
    if f_dem >= 0.0:
        return ecms_split(f_dem, v, soc, chassis, mot, eng, pack, ecms)
    return _brake_split(-f_dem, v, chassis, mot, pack, soc, dt, ecms.soc_regen_max)
