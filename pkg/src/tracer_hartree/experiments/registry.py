"""Fixed registry of record quantities, their acceptance rules and claims.

Every row written to ``records.csv`` names a quantity from ``QUANTITIES``.
The rule decides the acceptance window stored with the row:

``upper``   value <= tol
``lower``   value >= tol
``margin``  value >= -tol (a bound's slack, allowing roundoff)
``target``  |value - target| <= tol (target supplied per row)
``window``  lower <= value <= upper (both supplied per row)
``info``    reported, never judged
"""

from __future__ import annotations

from dataclasses import dataclass

CLAIMS: dict[str, str] = {
    "ground-state-convergence": "constrained Hartree minimizer converges to a real stationary state",
    "boost-chemical-shift": "boosted minimizer Q_k = exp(-ikx/2) Q_0 has chemical potential mu_0 + k^2/4",
    "boost-energy-identity": "E_k[Q_k] = k^2/4 + E_0[Q_0]",
    "regularity-bound": "H^3 norm of Q_0 bounded by |mu_0|^-1 (|w|_C1 + |lam v|_C1) |Q_0|_H1",
    "variational-bracket": "N k^2/4 + E_N(0) <= E_N(k) <= product-state energy",
    "hartree-limit-trend": "E_N(k)/N approaches k^2/4 + E_0[Q_0] as N grows",
    "boost-matrix-identity": "tau^+ H_N(k) tau = N k^2/4 + P_b^2/2N + H_N(0) as matrices",
    "boost-identity-unwrapped": "tau^+ H_N(k) tau = N k^2/4 + H_N(0) on momentum modes that do not wrap",
    "meanfield-rate": "Fock-space mean-field error decays like N^-1/2",
    "vacuum-defect-oracle": "2 sqrt(N) |L_N Omega| = |Laplacian phi_0|",
    "fluctuation-growth": "L_N, N_b and Q_b moments of the fluctuation state grow at most exponentially",
    "coherent-state-identities": "Weyl-operator vacuum overlap and mean particle number",
    "gauge-equivalence": "tracer-frame and lab-frame evolutions agree after translation",
    "small-potential-bounds": "H^1 and tracer-velocity bounds under the smallness hypothesis",
    "ehrenfest-law": "tracer acceleration equals the force of w; the v-term vanishes",
    "stationary-transport": "boosted ground state moves rigidly with velocity k/2",
    "conservation": "mass and E_k conserved along the flow",
    "integrator-order": "Strang splitting converges at second order",
    "diagnostic": "reported values without an acceptance rule",
}


@dataclass(frozen=True)
class Quantity:
    name: str
    claim: str
    rule: str
    tolerance: float = 0.0
    description: str = ""


def _q(name, claim, rule, tol=0.0, desc=""):
    return name, Quantity(name, claim, rule, tol, desc)


QUANTITIES: dict[str, Quantity] = dict([
    # ground_state
    _q("ground_mu0", "diagnostic", "info", desc="chemical potential of Q_0"),
    _q("ground_energy", "diagnostic", "info", desc="E_0[Q_0]"),
    _q("ground_residual", "ground-state-convergence", "upper", 1e-9, "stationary residual of Q_0"),
    _q("ground_imag_defect", "ground-state-convergence", "upper", 1e-8, "sup |Im Q_0| after the best global phase"),
    _q("ground_current", "ground-state-convergence", "upper", 1e-10, "|j(Q_0)|"),
    _q("boost_delta_mu", "boost-chemical-shift", "target", 1e-7, "Rayleigh-quotient mu_k - mu_0 on boost(Q_0)"),
    _q("boost_delta_mu_minimizer", "boost-chemical-shift", "target", 1e-7,
       "mu_k - mu_0 with Q_k from an independent minimization"),
    _q("boost_residual_k", "boost-chemical-shift", "upper", 1e-7, "k-stationary residual at mu_0 + k^2/4"),
    _q("boost_residual_measured", "diagnostic", "info", desc="k-stationary residual at the measured mu_k"),
    _q("boost_energy_gap", "boost-energy-identity", "upper", 1e-7, "|E_k[Q_k] - k^2/4 - E_0[Q_0]|"),
    _q("h3_lhs", "diagnostic", "info", desc="|Q_0|_H3"),
    _q("h3_rhs", "diagnostic", "info", desc="|mu_0|^-1 (|w|_C1 + |lam v|_C1) |Q_0|_H1"),
    _q("h3_bound_margin", "regularity-bound", "margin", 0.0, "rhs - lhs of the H^3 bound"),
    # dynamics
    _q("mass_drift_rate", "conservation", "upper", 1e-10, "max |mass(t) - mass(0)| per unit time"),
    _q("energy_drift_rate", "conservation", "upper", 1e-6, "max |E_k(t) - E_k(0)| per unit time"),
    _q("boundary_mass_max", "diagnostic", "info", desc="largest mass near the box boundary"),
    _q("self_convergence_order", "integrator-order", "lower", 1.9, "log2 of successive terminal differences"),
    _q("ehrenfest_v_term_max", "ehrenfest-law", "upper", 1e-12, "max |lam int |psi|^2 grad(v*|psi|^2)|"),
    _q("ehrenfest_residual_max", "diagnostic", "info", desc="max |X'' - force| at one step size"),
    _q("ehrenfest_order", "ehrenfest-law", "lower", 1.8, "observed order of the Ehrenfest residual"),
    _q("stationary_acceleration_max", "stationary-transport", "upper", 1e-6, "max |X''| from Q_k data"),
    _q("stationary_drift_deviation", "stationary-transport", "upper", 1e-6, "max |X(t) - X(0) - (k/2) t|"),
    _q("stationary_fidelity", "stationary-transport", "upper", 1e-6, "max || |phi(t)| - |Q_k| ||_2"),
    _q("momentum_constant", "diagnostic", "info", desc="smallest C with |X'| <= |k| + C |psi_0|_H1"),
    _q("smallness_parameter", "diagnostic", "info", desc="|w|_W1,3/2 + 3 |lam v|_W1,3/2"),
    _q("h1_bound_margin", "small-potential-bounds", "margin", 0.0, "bound - max_t |psi|_H1"),
    _q("velocity_bound_margin", "small-potential-bounds", "margin", 0.0, "bound - max_t |X'|"),
    _q("y_norm_mixed", "diagnostic", "info", desc="L^10/3 in time of the W^1,10/3 norm"),
    # gauge_check
    _q("gauge_discrepancy", "gauge-equivalence", "upper", 1e-6, "|phi_direct(T) - phi_gauge(T)|_2"),
    _q("gauge_current_gap", "diagnostic", "info", desc="|j_direct(T) - j_gauge(T)|"),
    _q("direct_stationary_error", "diagnostic", "info",
       desc="|phi_direct(T) - exp(-i mu_k T) Q_k|_2 with the measured mu_k"),
    # en_asymptotics
    _q("en_ground_energy", "diagnostic", "info", desc="E_N(k)"),
    _q("en_lower_margin", "variational-bracket", "margin", 1e-9, "E_N(k) - N k^2/4 - E_N(0)"),
    _q("en_upper_margin", "variational-bracket", "margin", 1e-9, "product-state energy - E_N(k)"),
    _q("en_hartree_energy", "diagnostic", "info", desc="lattice E_0[Q_0]"),
    _q("en_hartree_gap", "diagnostic", "info", desc="|E_N(k)/N - k^2/4 - E_0[Q_0]|"),
    _q("en_gap_change", "hartree-limit-trend", "upper", 0.0, "gap(N_next) - gap(N)"),
    _q("boost_identity_literal", "boost-matrix-identity", "upper", 1e-10,
       "max |tau^+ H_N(k) tau - N k^2/4 - P_b^2/2N - H_N(0)|"),
    _q("boost_identity_corrected", "diagnostic", "info", desc="max |tau^+ H_N(k) tau - N k^2/4 - H_N(0)|"),
    _q("boost_identity_compatible", "boost-identity-unwrapped", "upper", 1e-10,
       "corrected discrepancy restricted to unwrapped momentum configurations"),
    _q("boost_potential_commutes", "boost-identity-unwrapped", "upper", 1e-12, "max |tau^+ W tau - W|"),
    # mf_convergence
    _q("mf_error", "diagnostic", "info", desc="|exact - mean-field| in Fock space"),
    _q("mf_initial_error", "meanfield-rate", "upper", 1e-8, "error at t = 0 (truncation residue)"),
    _q("mf_identity_gap", "meanfield-rate", "upper", 1e-10, "|error^2 - 2(1 - Re overlap)|"),
    _q("mf_ratio", "meanfield-rate", "window", 0.0, "error(N_next, t) / error(N, t)"),
    _q("mf_monotone_excess", "meanfield-rate", "upper", 0.0, "error(N_next)/error(N) - 1"),
    _q("mf_truncation_fraction", "meanfield-rate", "upper", 0.1, "|error - error with extra headroom| / error"),
    _q("mf_error_literal", "diagnostic", "info", desc="error with the opposite sign of the phase"),
    # bound_suite
    _q("ln_vacuum_oracle", "vacuum-defect-oracle", "upper", 1e-9, "|2 sqrt(N) |L_N Omega| - |Laplacian phi_0||"),
    _q("growth_C1", "fluctuation-growth", "lower", 1e-12, "fitted exponential rate"),
    _q("growth_fit_residual", "fluctuation-growth", "upper", 0.30, "max relative residual of the fit"),
    _q("growth_envelope_excess", "fluctuation-growth", "upper", 0.10, "max series / fit - 1"),
    _q("fluctuation_norm_defect", "fluctuation-growth", "upper", 1e-10, "max | |V_t Omega| - 1 |"),
    _q("weyl_vacuum_overlap", "coherent-state-identities", "upper", 1e-8, "|<Omega, W Omega> - exp(-N/2)|"),
    _q("weyl_number", "coherent-state-identities", "upper", 1e-8, "|<W Omega, N_b W Omega> - N|"),
    _q("truncation_tail", "coherent-state-identities", "upper", 1e-8, "Poisson tail above n_max"),
    _q("hcor_number_commutator", "diagnostic", "info", desc="max |[H_cor, N_b]| (nonzero)"),
])

# Quantities every completed run of a mode must contain.
MODE_REQUIRED: dict[str, tuple[str, ...]] = {
    "ground_state": ("ground_mu0", "ground_residual", "boost_delta_mu", "boost_residual_k", "boost_energy_gap"),
    "dynamics": ("mass_drift_rate", "energy_drift_rate", "ehrenfest_v_term_max"),
    "gauge_check": ("gauge_discrepancy",),
    "en_asymptotics": ("en_ground_energy", "en_lower_margin", "en_upper_margin", "en_hartree_gap"),
    "mf_convergence": ("mf_error", "mf_initial_error", "mf_identity_gap"),
    "bound_suite": ("ln_vacuum_oracle", "growth_C1", "growth_fit_residual", "growth_envelope_excess"),
}


def window(quantity: str, tol: float, target: float | None = None,
           lower: float | None = None, upper: float | None = None) -> tuple[float | None, float | None]:
    """Acceptance window ``(lower, upper)`` for a quantity; ``None`` means unbounded."""
    q = QUANTITIES[quantity]
    if q.rule == "info":
        return None, None
    if q.rule == "upper":
        return None, tol
    if q.rule == "lower":
        return tol, None
    if q.rule == "margin":
        return -tol, None
    if q.rule == "target":
        if target is None:
            raise ValueError(f"{quantity} needs a target value")
        return target - tol, target + tol
    if lower is None or upper is None:
        raise ValueError(f"{quantity} needs explicit bounds")
    return lower, upper


def judge(value: float, lower: float | None, upper: float | None) -> bool | None:
    if lower is None and upper is None:
        return None
    if value != value:  # NaN never passes
        return False
    return (lower is None or value >= lower) and (upper is None or value <= upper)
