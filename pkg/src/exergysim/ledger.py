"""Cumulative availability bookkeeping for a simulation run.

Every entry is stored as its signed contribution to the vehicle exergy, in
Joules, so the plain sum of the closure terms equals X_veh(t_f) - X_veh(0)
exactly (up to float rounding). Transfer terms that remove availability
(braking, rolling, drag, heat, destruction) are therefore negative numbers
here even where the underlying power is conventionally quoted positive.

``x_fuel_eng`` is carried as a diagnostic only: by construction of the
engine balance it always equals the sum of the five engine-side terms, so
including it in the closure sum would double-count the engine.
"""

from dataclasses import dataclass, field

import numpy as np

#: every term tracked by the ledger
TERMS = (
    "e_trac",
    "e_brake",
    "e_roll",
    "e_aero",
    "e_batt",
    "x_dest_batt",
    "x_heat_batt",
    "x_dest_mot",
    "x_heat_mot",
    "x_fuel_eng",
    "x_work_eng",
    "x_exh_eng",
    "x_heat_eng",
    "x_fric_eng",
    "x_comb_eng",
)

#: terms whose plain sum reproduces X_veh(t_f) - X_veh(0)
CLOSURE_TERMS = tuple(t for t in TERMS if t != "x_fuel_eng")

#: loss categories reported by close(); each maps to the ledger terms whose
#: (negated) sum it represents
_CATEGORIES = {
    "rolling": ("e_roll",),
    "aerodynamic": ("e_aero",),
    "braking": ("e_brake",),
    "powertrain_conversion": ("e_trac", "e_batt", "x_work_eng"),
    "battery_heat": ("x_heat_batt",),
    "battery_destruction": ("x_dest_batt",),
    "motor_heat": ("x_heat_mot",),
    "motor_destruction": ("x_dest_mot",),
    "engine_combustion": ("x_comb_eng",),
    "engine_exhaust": ("x_exh_eng",),
    "engine_heat": ("x_heat_eng",),
    "engine_friction": ("x_fric_eng",),
}


@dataclass
class ExergyLedger:
    """Signed cumulative exergy transfer/destruction integrals plus the
    vehicle exergy trajectory of the run that produced them."""

    terms: dict = field(default_factory=lambda: {t: 0.0 for t in TERMS})
    x_veh: np.ndarray | None = None  # J, filled by the simulation
    x_rel: np.ndarray | None = None  # dimensionless, filled by the simulation

    def add(self, term, joules):
        if term not in self.terms:
            raise ValueError(f"unknown ledger term {term!r}")
        self.terms[term] += joules

    def __getitem__(self, term):
        if term not in self.terms:
            raise ValueError(f"unknown ledger term {term!r}")
        return self.terms[term]

    def total(self):
        """Net change of vehicle exergy accounted by the ledger, J (<= 0)."""
        return sum(self.terms[t] for t in CLOSURE_TERMS)

    def total_loss(self):
        """Availability lost over the run, X_veh(0) - X_veh(t_f), J (>= 0)."""
        return -self.total()

    def close(self):
        """Percentage breakdown of the total loss by physical category.

        Returns a dict mapping category name to percent of the total loss;
        zero-valued categories are omitted, and a run with no losses yields
        an empty dict.
        """
        loss = self.total_loss()
        if loss == 0.0:
            return {}
        out = {}
        for name, parts in _CATEGORIES.items():
            value = -sum(self.terms[p] for p in parts)
            if value != 0.0:
                out[name] = 100.0 * value / loss
        return out

    def as_dict(self):
        return dict(self.terms)
