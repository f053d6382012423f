"""Tolerances used by the experiment harness. Override per run with ``--tol NAME=VALUE``."""

TOLERANCES_VERSION = "1"

TOLERANCES = {
    # closed-form values quoted to 11 significant digits
    "closed_form": 1e-9,
    "symmetric_point": 1e-10,
    "equal_info_angle": 1e-10,
    "q_symmetry": 1e-12,
    "read_table": 1e-12,
    # Monte Carlo, absolute
    "mc_read": 0.005,
    "destruction_correlation": 0.01,
    "unopened_ber": 0.02,
    # multiples of the binomial standard error
    "ber_sigmas": 4.0,
}

QUOTED = {
    "read_probability_2": 0.85355339059,
    "info_2": 0.39912396329,
    "info_3": 0.2559924488,
}


def tolerances(overrides=None) -> dict:
    table = dict(TOLERANCES)
    for name, value in (overrides or {}).items():
        if name not in table:
            raise KeyError(f"unknown tolerance {name!r}; known: {', '.join(sorted(table))}")
        table[name] = float(value)
    return table
