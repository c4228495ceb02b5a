"""Hot numeric kernels with a numba backend and a pure-NumPy fallback.

Every kernel is written once as a plain scalar function. At import time the
module compiles them with ``numba.njit`` unless the environment variable
``EXERGYSIM_BACKEND=numpy`` is set (or numba is unavailable), in which case
the uncompiled functions are used directly. ``benchmarks/bench_backends.py``
compares the two paths.

Kernels deliberately return status flags instead of raising, so they stay
nopython-compatible; the owning modules translate flags into exceptions.
"""

import os

import numpy as np

_env_backend = os.environ.get("EXERGYSIM_BACKEND", "numba").strip().lower()

JIT_ENABLED = False
if _env_backend != "numpy":
    try:
        from numba import njit as _njit

        JIT_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
        JIT_ENABLED = False

BACKEND = "numba" if JIT_ENABLED else "numpy"


def _maybe_jit(func):
    if JIT_ENABLED:
        return _njit(cache=True)(func)
    return func


# ---------------------------------------------------------------------------
# interpolation


def _lerp1(x, xp, fp):
    """Piecewise-linear interpolation, clamped to the table edges."""
    return np.interp(x, xp, fp)


def _bilinear(x, y, x_bp, y_bp, table):
    """Clamped bilinear interpolation on a rectangular grid.

    ``table[i, j]`` holds the value at ``(x_bp[i], y_bp[j])``. Queries outside
    the grid hull are clamped to the nearest edge.
    """
    nx = x_bp.shape[0]
    ny = y_bp.shape[0]
    if x <= x_bp[0]:
        i = 0
        tx = 0.0
    elif x >= x_bp[nx - 1]:
        i = nx - 2
        tx = 1.0
    else:
        i = np.searchsorted(x_bp, x) - 1
        tx = (x - x_bp[i]) / (x_bp[i + 1] - x_bp[i])
    if y <= y_bp[0]:
        j = 0
        ty = 0.0
    elif y >= y_bp[ny - 1]:
        j = ny - 2
        ty = 1.0
    else:
        j = np.searchsorted(y_bp, y) - 1
        ty = (y - y_bp[j]) / (y_bp[j + 1] - y_bp[j])
    f00 = table[i, j]
    f10 = table[i + 1, j]
    f01 = table[i, j + 1]
    f11 = table[i + 1, j + 1]
    return (
        f00 * (1.0 - tx) * (1.0 - ty)
        + f10 * tx * (1.0 - ty)
        + f01 * (1.0 - tx) * ty
        + f11 * tx * ty
    )


# ---------------------------------------------------------------------------
# ideal-gas properties, 7-coefficient two-range polynomial form
#
# cp/R = a1 + a2 T + a3 T^2 + a4 T^3 + a5 T^4
# h/RT = a1 + a2 T/2 + a3 T^2/3 + a4 T^3/4 + a5 T^4/5 + a6/T
# s/R  = a1 ln T + a2 T + a3 T^2/2 + a4 T^3/3 + a5 T^4/4 + a7

GAS_CONSTANT = 8.314462618  # J/(mol K)


def _gas_cp(t, c_low, c_high, t_split):
    c = c_low if t <= t_split else c_high
    return GAS_CONSTANT * (c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4]))))


def _gas_enthalpy(t, c_low, c_high, t_split):
    c = c_low if t <= t_split else c_high
    poly = c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * (c[3] / 4.0 + t * c[4] / 5.0)))
    return GAS_CONSTANT * (t * poly + c[5])


def _gas_entropy(t, c_low, c_high, t_split):
    c = c_low if t <= t_split else c_high
    poly = t * (c[1] + t * (c[2] / 2.0 + t * (c[3] / 3.0 + t * c[4] / 4.0)))
    return GAS_CONSTANT * (c[0] * np.log(t) + poly + c[6])


# ---------------------------------------------------------------------------
# battery


def _battery_current(v_oc, r0, p_batt):
    """Solve P = (V_oc - R0 I) I for the physical (smaller-|I|) root.

    Returns ``(i, v_terminal, ok)``; ``ok`` is False when the demanded power
    exceeds the V_oc^2/(4 R0) capability of the source.
    """
    disc = v_oc * v_oc - 4.0 * r0 * p_batt
    if disc < 0.0:
        return 0.0, 0.0, False
    # 2P/(V_oc + sqrt(disc)) form avoids cancellation for small |P|
    i = 2.0 * p_batt / (v_oc + np.sqrt(disc))
    return i, v_oc - r0 * i, True


# ---------------------------------------------------------------------------
# interior-PM machine: torque and minimum-current operating point
#
# torque = 1.5 n_pp (lam_pm i_q + (l_d - l_q) i_d i_q)


def _machine_torque(i_d, i_q, l_d, l_q, lam_pm, n_pp):
    return 1.5 * n_pp * (lam_pm * i_q + (l_d - l_q) * i_d * i_q)


def _mtpa_currents(tau, l_d, l_q, lam_pm, n_pp, tol, max_iter):
    """Minimum-magnitude (i_d, i_q) delivering ``tau``.

    Bisects on i_q along the minimum-current locus
    i_d(i_q) = (a - sqrt(a^2 + 4 i_q^2)) / 2 with a = lam_pm/(l_q - l_d);
    torque is monotone in i_q on the locus, so the bracket
    [0, |tau| / (1.5 n_pp lam_pm)] always contains the solution.
    Returns ``(i_d, i_q, converged)``.
    """
    if tau == 0.0:
        return 0.0, 0.0, True
    k_pm = 1.5 * n_pp * lam_pm
    tau_abs = abs(tau)
    if l_d == l_q:
        i_q = tau_abs / k_pm
        if tau < 0.0:
            i_q = -i_q
        return 0.0, i_q, True
    a = lam_pm / (l_q - l_d)
    lo = 0.0
    hi = tau_abs / k_pm
    i_q = hi
    i_d = 0.5 * (a - np.sqrt(a * a + 4.0 * i_q * i_q))
    converged = False
    for _ in range(max_iter):
        i_q = 0.5 * (lo + hi)
        i_d = 0.5 * (a - np.sqrt(a * a + 4.0 * i_q * i_q))
        t_mid = _MTPA_TORQUE(i_d, i_q, l_d, l_q, lam_pm, n_pp)
        err = t_mid - tau_abs
        if abs(err) <= tol * max(1.0, tau_abs):
            converged = True
            break
        if err < 0.0:
            lo = i_q
        else:
            hi = i_q
    if tau < 0.0:
        i_q = -i_q
    return i_d, i_q, converged


def _motor_loss_terms(i_d, i_q, omega, r_s, k_h, k_f, l_d, l_q, lam_eff):
    """(copper, iron, friction) loss powers of the electric machine, W."""
    p_copper = r_s * (i_d * i_d + i_q * i_q)
    flux_d = l_d * i_d + lam_eff
    flux_q = l_q * i_q
    p_iron = k_h * omega * (flux_d * flux_d + flux_q * flux_q)
    p_fric = k_f * omega * omega
    return p_copper, p_iron, p_fric


# ---------------------------------------------------------------------------
# instantaneous torque-split search (hybrid supervisor)


def _ecms_sweep(
    tau_dem,
    omega,
    v_oc,
    r0,
    s_dis_eff,
    s_chg_eff,
    lhv,
    tau_max_mot,
    p_max_mot,
    p_dis_max,
    p_chg_max,
    tau_max_eng,
    omega_min_eng,
    mot_tau_bp,
    mot_omega_bp,
    mot_eff,
    eng_tau_bp,
    eng_omega_bp,
    eng_fuel,
    n_cand,
):
    """Exhaustive search over a motor-torque-fraction grid plus an engine-off
    candidate. Only candidates that deliver ``tau_dem`` exactly and respect
    machine and battery limits are scored with

        cost = mdot_fuel + s_eff * p_batt / lhv.

    Ties (within 1e-12 relative) resolve toward smaller |p_batt|. Returns
    ``(found, index, tau_eng, tau_mot, p_batt, mdot_fuel)`` where index
    ``n_cand`` denotes the engine-off candidate.
    """
    engine_on_allowed = omega >= omega_min_eng
    if omega > 0.0:
        tau_mot_cap = min(tau_max_mot, p_max_mot / omega)
    else:
        tau_mot_cap = tau_max_mot

    found = False
    best_idx = -1
    best_cost = 0.0
    best_p = 0.0
    best_tau_eng = 0.0
    best_tau_mot = 0.0
    best_mdot = 0.0

    for k in range(n_cand + 1):
        if k < n_cand:
            u = -1.0 + 2.0 * k / (n_cand - 1)
            tau_mot = u * tau_mot_cap
            tau_eng = tau_dem - tau_mot
            if tau_eng < 0.0:
                continue
            if tau_eng > 0.0 and not engine_on_allowed:
                continue
            if tau_eng > tau_max_eng:
                continue
        else:
            # engine-off candidate: motor carries the demand alone
            tau_mot = tau_dem
            tau_eng = 0.0
            if abs(tau_mot) > tau_mot_cap:
                continue

        p_mot = tau_mot * omega
        if p_mot > 0.0:
            eta = _ECMS_EFF(abs(tau_mot), omega, mot_tau_bp, mot_omega_bp, mot_eff)
            p_batt = p_mot / eta
        elif p_mot < 0.0:
            eta = _ECMS_EFF(abs(tau_mot), omega, mot_tau_bp, mot_omega_bp, mot_eff)
            p_batt = p_mot * eta
        else:
            p_batt = 0.0
        if p_batt > p_dis_max or p_batt < -p_chg_max:
            continue
        _i, _v, ok = _ECMS_BATT(v_oc, r0, p_batt)
        if not ok:
            continue

        if tau_eng > 0.0:
            mdot = _ECMS_FUEL(tau_eng, omega, eng_tau_bp, eng_omega_bp, eng_fuel)
        else:
            mdot = 0.0

        s_eff = s_dis_eff if p_batt >= 0.0 else s_chg_eff
        cost = mdot + s_eff * p_batt / lhv

        if not found:
            take = True
        else:
            tie = abs(cost - best_cost) <= 1e-12 * (1.0 + abs(best_cost))
            if tie:
                take = abs(p_batt) < abs(best_p)
            else:
                take = cost < best_cost
        if take:
            found = True
            best_idx = k
            best_cost = cost
            best_p = p_batt
            best_tau_eng = tau_eng
            best_tau_mot = tau_mot
            best_mdot = mdot

    return found, best_idx, best_tau_eng, best_tau_mot, best_p, best_mdot


# ---------------------------------------------------------------------------
# backend wiring
#
# _mtpa_currents and _ecms_sweep call other kernels through the module-level
# aliases below, so both functions see jitted callees under the numba backend
# and the plain functions under the numpy backend.

lerp1 = _maybe_jit(_lerp1)
bilinear = _maybe_jit(_bilinear)
gas_cp = _maybe_jit(_gas_cp)
gas_enthalpy = _maybe_jit(_gas_enthalpy)
gas_entropy = _maybe_jit(_gas_entropy)
battery_current = _maybe_jit(_battery_current)
machine_torque = _maybe_jit(_machine_torque)
motor_loss_terms = _maybe_jit(_motor_loss_terms)

_MTPA_TORQUE = machine_torque
mtpa_currents = _maybe_jit(_mtpa_currents)

_ECMS_EFF = bilinear
_ECMS_BATT = battery_current
_ECMS_FUEL = bilinear
ecms_sweep = _maybe_jit(_ecms_sweep)

# plain-python implementations, kept addressable for benchmarks and tests
PY_IMPLS = {
    "lerp1": _lerp1,
    "bilinear": _bilinear,
    "gas_cp": _gas_cp,
    "gas_enthalpy": _gas_enthalpy,
    "gas_entropy": _gas_entropy,
    "battery_current": _battery_current,
    "machine_torque": _machine_torque,
    "motor_loss_terms": _motor_loss_terms,
    "mtpa_currents": _mtpa_currents,
    "ecms_sweep": _ecms_sweep,
}
