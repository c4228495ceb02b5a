"""Fixed-step forward simulation and whole-vehicle availability balance.

Per step, in fixed order for determinism: the driver turns the speed error
into a force demand (using the actual speed of the previous step), dispatch
maps the demand onto the actuators, the battery/motor/engine models advance
and report their availability rates, the longitudinal state integrates, and
every rate is accumulated into the ledger. The vehicle exergy trajectory is
the running sum of exactly the same increments, so the ledger closes against
it to float precision.
"""

import time as _time
from dataclasses import dataclass, field

import numpy as np

from . import battery, dynamics, engine, motor, supervisor
from .errors import ConfigError, SimulationError
from .ledger import ExergyLedger
from .thermo import ReferenceState, load_species_table

ARCH_EV = "ev"
ARCH_HEV = "hev"

#: column order of the time-series block every run produces
SERIES_COLUMNS = (
    "t",
    "v",
    "v_target",
    "soc",
    "soe",
    "c_rate",
    "t_batt",
    "t_mot",
    "tau_mot",
    "tau_eng",
    "mdot_fuel",
    "p_trac",
    "p_brake",
    "p_roll",
    "p_aero",
    "w_batt",
    "xdot_dest_batt",
    "xdot_heat_batt",
    "xdot_dest_mot",
    "xdot_heat_mot",
    "xdot_fuel_eng",
    "xdot_work_eng",
    "xdot_exh_eng",
    "xdot_heat_eng",
    "xdot_fric_eng",
    "xdot_comb_eng",
    "xdot_veh",
    "x_veh",
    "x_rel",
)


@dataclass
class SimConfig:
    architecture: str
    dt: float
    soc0: float
    soe0: float
    ref: ReferenceState
    chassis: dynamics.ChassisParams
    driver: supervisor.DriverParams
    pack: battery.PackParams
    motor: motor.MotorParams
    engine: engine.EngineParams | None = None
    ecms: supervisor.EcmsParams | None = None
    t_batt0: float | None = None  # defaults to the reference temperature
    t_mot0: float | None = None
    species: dict = field(default_factory=load_species_table)

    def __post_init__(self):
        if self.architecture not in (ARCH_EV, ARCH_HEV):
            raise ConfigError(f"unknown architecture {self.architecture!r}")
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if not 0.0 <= self.soc0 <= 1.0 or not 0.0 <= self.soe0 <= 1.0:
            raise ConfigError("initial SoC/SoE must lie in [0, 1]")
        if self.architecture == ARCH_HEV:
            if self.engine is None or self.ecms is None:
                raise ConfigError("a hybrid run needs engine parameters and a torque-split policy")
        if self.t_batt0 is None:
            self.t_batt0 = self.ref.T0
        if self.t_mot0 is None:
            self.t_mot0 = self.ref.T0
        if self.t_batt0 < self.ref.T0 or self.t_mot0 < self.ref.T0:
            raise ConfigError("initial temperatures must not be below the reference temperature")


@dataclass
class SimResult:
    time: np.ndarray
    series: dict
    ledger: ExergyLedger
    summary: dict


def initial_vehicle_exergy(config):
    """Availability on board at t = 0: charged battery plus, for a hybrid,
    the full-tank fuel availability."""
    x0 = battery.initial_exergy(config.pack, config.soc0)
    if config.architecture == ARCH_HEV:
        x0 += engine.max_fuel_exergy(config.engine)
    return x0


def relative_exergy(x_veh, architecture, pack, engine_params=None):
    """Vehicle exergy normalized by the maximum storable availability."""
    denom = pack.e_nom
    if architecture == ARCH_HEV:
        if engine_params is None:
            raise ConfigError("hybrid normalization needs engine parameters")
        denom += engine.max_fuel_exergy(engine_params)
    if denom <= 0.0:
        raise ValueError("normalization denominator must be positive")
    return x_veh / denom


def powertrain_losses(ledger, architecture):
    """Net availability lost converting stored energy into traction, J
    (ledger-signed, <= 0 for any real powertrain)."""
    loss = ledger["e_trac"] + ledger["e_batt"]
    if architecture == ARCH_HEV:
        loss += ledger["x_work_eng"]
    return loss


def run(config, cycle):
    """Simulate a drive cycle and return the full availability accounting."""
    if cycle.t.size < 2:
        raise ConfigError("the drive cycle needs at least two samples")
    dt = config.dt
    n_steps = int(round(cycle.t[-1] / dt))
    if n_steps < 1:
        raise ConfigError("cycle shorter than one time step")

    t_grid = np.arange(n_steps + 1) * dt
    v_target = np.interp(t_grid, cycle.t, cycle.v)

    hybrid = config.architecture == ARCH_HEV
    ref = config.ref
    chassis = config.chassis
    pack = config.pack
    mot = config.motor
    eng = config.engine
    stoich = engine.stoichiometry(eng.x, eng.y) if hybrid else None

    ledger = ExergyLedger()
    cols = {name: np.zeros(n_steps + 1) for name in SERIES_COLUMNS}
    cols["t"] = t_grid
    cols["v_target"] = v_target

    x_veh = np.empty(n_steps + 1)
    x_veh[0] = initial_vehicle_exergy(config)

    lstate = dynamics.LongitudinalState(v=float(v_target[0]))
    bstate = battery.BatteryState(soc=config.soc0, soe=config.soe0, temp=config.t_batt0)
    mstate = motor.MotorState(temp=config.t_mot0)
    dstate = supervisor.DriverState()
    fuel_mass = 0.0
    t_start = _time.perf_counter()

    for k in range(n_steps):
        v = lstate.v
        f_dem, dstate = supervisor.driver_step(v_target[k + 1], v, config.driver, dstate, dt)

        try:
            if hybrid:
                cmd = supervisor.hev_dispatch(
                    f_dem, v, bstate.soc, chassis, mot, eng, pack, config.ecms, dt
                )
            else:
                cmd = supervisor.ev_dispatch(f_dem, v, chassis, mot, pack, bstate.soc, dt)
            omega = supervisor.machine_speed(v, chassis)
            bstate, bterms = battery.step(pack, bstate, cmd.p_batt, ref, dt)
            mstate, mterms = motor.step(mot, mstate, cmd.tau_mot, omega, ref, dt)
            if hybrid and cmd.tau_eng > 0.0:
                eterms = engine.step(eng, stoich, config.species, ref, cmd.tau_eng, omega)
            else:
                eterms = engine.ENGINE_OFF
        except SimulationError as exc:
            raise type(exc)(exc.base_message, step=k) from exc
        except ValueError as exc:
            raise SimulationError(str(exc), step=k) from exc

        lstate, pterms = dynamics.step_longitudinal(lstate, cmd.f_trac, cmd.f_brake, chassis, dt)

        n_mot = mot.count
        x_long_rate = dynamics.hamiltonian_rate(pterms)
        xdot = x_long_rate + bterms.x_batt + n_mot * mterms.x_mot
        if hybrid:
            xdot += eterms.x_work + eterms.x_exh + eterms.x_heat + eterms.x_fric + eterms.x_comb

        ledger.add("e_trac", pterms.p_trac * dt)
        ledger.add("e_brake", -pterms.p_brake * dt)
        ledger.add("e_roll", -pterms.p_roll * dt)
        ledger.add("e_aero", -pterms.p_aero * dt)
        ledger.add("e_batt", bterms.work * dt)
        ledger.add("x_dest_batt", bterms.x_dest * dt)
        ledger.add("x_heat_batt", bterms.x_heat * dt)
        ledger.add("x_dest_mot", n_mot * mterms.x_dest * dt)
        ledger.add("x_heat_mot", n_mot * mterms.x_heat * dt)
        if hybrid:
            ledger.add("x_fuel_eng", -eterms.x_fuel * dt)
            ledger.add("x_work_eng", eterms.x_work * dt)
            ledger.add("x_exh_eng", eterms.x_exh * dt)
            ledger.add("x_heat_eng", eterms.x_heat * dt)
            ledger.add("x_fric_eng", eterms.x_fric * dt)
            ledger.add("x_comb_eng", eterms.x_comb * dt)
            fuel_mass += eterms.mdot_fuel * dt

        x_veh[k + 1] = x_veh[k] + xdot * dt

        cols["v"][k] = v
        cols["soc"][k] = bstate.soc
        cols["soe"][k] = bstate.soe
        cols["c_rate"][k] = bstate.current / pack.n_p / pack.cell.q_nom
        cols["t_batt"][k] = bstate.temp
        cols["t_mot"][k] = mstate.temp
        cols["tau_mot"][k] = cmd.tau_mot
        cols["tau_eng"][k] = cmd.tau_eng
        cols["mdot_fuel"][k] = eterms.mdot_fuel
        cols["p_trac"][k] = pterms.p_trac
        cols["p_brake"][k] = pterms.p_brake
        cols["p_roll"][k] = pterms.p_roll
        cols["p_aero"][k] = pterms.p_aero
        cols["w_batt"][k] = bterms.work
        cols["xdot_dest_batt"][k] = bterms.x_dest
        cols["xdot_heat_batt"][k] = bterms.x_heat
        cols["xdot_dest_mot"][k] = n_mot * mterms.x_dest
        cols["xdot_heat_mot"][k] = n_mot * mterms.x_heat
        cols["xdot_fuel_eng"][k] = -eterms.x_fuel
        cols["xdot_work_eng"][k] = eterms.x_work
        cols["xdot_exh_eng"][k] = eterms.x_exh
        cols["xdot_heat_eng"][k] = eterms.x_heat
        cols["xdot_fric_eng"][k] = eterms.x_fric
        cols["xdot_comb_eng"][k] = eterms.x_comb
        cols["xdot_veh"][k] = xdot

    runtime = _time.perf_counter() - t_start

    # final row: terminal states, zero rates
    cols["v"][n_steps] = lstate.v
    cols["soc"][n_steps] = bstate.soc
    cols["soe"][n_steps] = bstate.soe
    cols["t_batt"][n_steps] = bstate.temp
    cols["t_mot"][n_steps] = mstate.temp

    x_rel = relative_exergy(x_veh, config.architecture, pack, eng)
    cols["x_veh"] = x_veh
    cols["x_rel"] = x_rel
    ledger.x_veh = x_veh
    ledger.x_rel = x_rel

    tracking_err = np.max(np.abs(cols["v"] - v_target))
    summary = {
        "architecture": config.architecture,
        "dt": dt,
        "duration": float(t_grid[-1]),
        "steps": n_steps,
        "runtime_s": runtime,
        "x_veh_initial": float(x_veh[0]),
        "x_veh_final": float(x_veh[-1]),
        "total_loss": ledger.total_loss(),
        "delta_soc": float(cols["soc"][n_steps] - config.soc0),
        "delta_soe": float(cols["soe"][n_steps] - config.soe0),
        "delta_x_rel": float(x_rel[-1] - x_rel[0]),
        "fuel_mass_kg": fuel_mass,
        "max_tracking_error_kmh": float(tracking_err * 3.6),
        "powertrain_loss": powertrain_losses(ledger, config.architecture),
    }
    for name, pct in ledger.close().items():
        summary[f"loss_pct_{name}"] = pct

    return SimResult(time=t_grid, series=cols, ledger=ledger, summary=summary)


def engine_on_fuel_samples(result):
    """Fuel-rate samples of the engine-on steps of a finished run."""
    mdot = result.series["mdot_fuel"]
    return mdot[mdot > 0.0]


def calibrate_on_cycle(config, cycle, target=0.10):
    """Run the hybrid once and return the wall-heat correlation scale factor
    that puts the cycle heat/fuel availability ratio at ``target``.

    The torque split does not depend on the heat term, so a single run
    provides the operating points.
    """
    if config.architecture != ARCH_HEV:
        raise ConfigError("heat-coefficient calibration applies to the hybrid only")
    result = run(config, cycle)
    samples = engine_on_fuel_samples(result)
    return engine.calibrate_heat_coefficient(config.engine, samples, config.ref, target=target)
