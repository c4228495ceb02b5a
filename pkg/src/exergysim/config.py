"""Run configuration: flat key-value files with one section per subsystem.

Every physical parameter of the two shipped vehicle presets (``ev.cfg``,
``hev.cfg``) is a named key, so studies can copy a preset and edit single
values. Map and curve files are referenced by path, resolved relative to the
config file itself.
"""

import configparser
import os
from dataclasses import dataclass
from importlib import resources

from . import battery, dynamics, io, motor, sim, supervisor, thermo
from .engine import EngineParams
from .errors import ConfigError

_G_PER_S = 1e-3  # fuel-map files carry g/s


def preset_path(name):
    """Filesystem path of a shipped preset config (``ev`` or ``hev``)."""
    p = resources.files("exergysim").joinpath(f"data/{name}.cfg")
    if not p.is_file():
        raise ConfigError(f"no preset named {name!r}")
    return str(p)


def bundled_cycle_path(name):
    """Filesystem path of a shipped drive cycle file."""
    p = resources.files("exergysim").joinpath(f"data/cycles/{name}.csv")
    if not p.is_file():
        raise ConfigError(f"no bundled cycle named {name!r}")
    return str(p)


@dataclass(frozen=True)
class RunManifest:
    """Everything one simulation invocation needs."""

    config_path: str
    cycle_path: str
    out_dir: str
    dt: float | None = None  # override of the configured step
    architecture: str | None = None  # override of the configured architecture

    def __post_init__(self):
        for label, path in (("config", self.config_path), ("cycle", self.cycle_path)):
            if not os.path.isfile(path):
                raise ConfigError(f"{label} file not found: {path}")


class _Section:
    def __init__(self, parser, name, path):
        self._name = name
        self._path = path
        if not parser.has_section(name):
            raise ConfigError(f"{path}: missing section [{name}]")
        self._sec = parser[name]

    def _raw(self, key):
        if key not in self._sec:
            raise ConfigError(f"{self._path}: missing key {key!r} in section [{self._name}]")
        return self._sec[key]

    def float(self, key, default=None):
        if default is not None and key not in self._sec:
            return default
        try:
            return float(self._raw(key))
        except ValueError:
            raise ConfigError(
                f"{self._path}: key {key!r} in [{self._name}] is not a number"
            ) from None

    def int(self, key, default=None):
        if default is not None and key not in self._sec:
            return default
        try:
            return int(self._raw(key))
        except ValueError:
            raise ConfigError(
                f"{self._path}: key {key!r} in [{self._name}] is not an integer"
            ) from None

    def str(self, key):
        return self._raw(key).strip()

    def path(self, key):
        return os.path.join(os.path.dirname(os.path.abspath(self._path)), self.str(key))


def load_config(path, architecture=None, dt=None):
    """Parse a config file into a :class:`exergysim.sim.SimConfig`.

    ``architecture`` and ``dt`` override the configured values when given.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found or unreadable: {path}")

    sim_sec = _Section(parser, "sim", path)
    arch = (architecture or sim_sec.str("architecture")).lower()
    step = dt if dt is not None else sim_sec.float("dt")

    try:
        return _build(parser, path, arch, step, sim_sec)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _build(parser, path, arch, step, sim_sec):
    ref_sec = _Section(parser, "reference", path)
    ref = thermo.ReferenceState(
        T0=ref_sec.float("t0"),
        P0=ref_sec.float("p0"),
        fractions={
            "N2": ref_sec.float("f_n2"),
            "O2": ref_sec.float("f_o2"),
            "CO2": ref_sec.float("f_co2"),
            "H2O": ref_sec.float("f_h2o"),
            "others": ref_sec.float("f_others"),
        },
    )

    ch = _Section(parser, "chassis", path)
    chassis = dynamics.ChassisParams(
        mass=ch.float("mass"),
        frontal_area=ch.float("frontal_area"),
        drag_coeff=ch.float("drag_coeff"),
        roll_coeff=ch.float("roll_coeff"),
        wheel_radius=ch.float("wheel_radius"),
        air_density=ch.float("air_density"),
        gravity=ch.float("gravity"),
        diff_efficiency=ch.float("diff_efficiency"),
        gear_ratio=ch.float("gear_ratio"),
    )

    dr = _Section(parser, "driver", path)
    driver = supervisor.DriverParams(
        kp=dr.float("kp"),
        ki=dr.float("ki"),
        f_trac_max=dr.float("f_trac_max"),
        f_brake_max=dr.float("f_brake_max"),
    )

    ba = _Section(parser, "battery", path)
    soc_bp, ocv, r0 = io.load_curve(ba.path("curve_file"))
    cell = battery.CellParams(
        q_nom=ba.float("q_nom_cell"),
        v_nom=ba.float("v_nom_cell"),
        soc_bp=soc_bp,
        ocv=ocv,
        r0=r0,
        heat_capacity=ba.float("cell_heat_capacity"),
        heat_transfer=ba.float("cell_heat_transfer"),
    )
    pack = battery.upscale(
        cell,
        ba.int("n_s"),
        ba.int("n_p"),
        p_dis_max=ba.float("p_dis_max"),
        p_chg_max=ba.float("p_chg_max"),
    )

    mo = _Section(parser, "motor", path)
    tau_bp, omega_bp, eff = io.load_grid(mo.path("map_file"))
    mot = motor.MotorParams(
        count=mo.int("count"),
        tau_bp=tau_bp,
        omega_bp=omega_bp,
        eff=eff,
        tau_max=mo.float("tau_max"),
        p_max=mo.float("p_max"),
        r_s0=mo.float("r_s0"),
        xi=mo.float("xi"),
        l_d=mo.float("l_d"),
        l_q=mo.float("l_q"),
        lambda_pm=mo.float("lambda_pm"),
        n_pp=mo.int("n_pp"),
        k_h=mo.float("k_h"),
        k_f=mo.float("k_f"),
        c_copper=mo.float("c_copper"),
        c_iron=mo.float("c_iron"),
        h_copper=mo.float("h_copper"),
        h_iron=mo.float("h_iron"),
    )

    eng = None
    ecms = None
    if arch == sim.ARCH_HEV:
        en = _Section(parser, "engine", path)
        e_tau_bp, e_omega_bp, fuel_gps = io.load_grid(en.path("map_file"))
        eng = EngineParams(
            tau_bp=e_tau_bp,
            omega_bp=e_omega_bp,
            fuel_map=fuel_gps * _G_PER_S,
            x=en.int("fuel_carbon"),
            y=en.int("fuel_hydrogen"),
            lhv=en.float("lhv"),
            afr_stoich=en.float("afr_stoich"),
            tank_volume=en.float("tank_volume"),
            fuel_density=en.float("fuel_density"),
            bore=en.float("bore"),
            displacement=en.float("displacement"),
            t_gas=en.float("t_gas"),
            t_coolant=en.float("t_coolant"),
            conductivity=en.float("conductivity"),
            viscosity=en.float("viscosity"),
            heat_a=en.float("heat_a"),
            heat_b=en.float("heat_b"),
            t_exhaust=en.float("t_exhaust"),
            fmep_c0=en.float("fmep_c0"),
            fmep_c1=en.float("fmep_c1"),
            fmep_c2=en.float("fmep_c2"),
            tau_max=en.float("tau_max"),
            omega_min=en.float("omega_min"),
        )
        ec = _Section(parser, "ecms", path)
        ecms = supervisor.EcmsParams(
            s_discharge=ec.float("s_discharge"),
            s_charge=ec.float("s_charge"),
            soc_ref=ec.float("soc_ref"),
            k_soc=ec.float("k_soc"),
            n_candidates=ec.int("n_candidates"),
            soc_regen_max=ec.float("soc_regen_max"),
        )

    return sim.SimConfig(
        architecture=arch,
        dt=step,
        soc0=sim_sec.float("soc_initial"),
        soe0=sim_sec.float("soe_initial"),
        ref=ref,
        chassis=chassis,
        driver=driver,
        pack=pack,
        motor=mot,
        engine=eng,
        ecms=ecms,
        t_batt0=sim_sec.float("t_batt_initial", default=ref.T0),
        t_mot0=sim_sec.float("t_mot_initial", default=ref.T0),
    )
