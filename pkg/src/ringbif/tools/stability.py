"""
stability_report and region_report tools

The spectral-stability window of the vortex ring in mu, an optional
numerical verdict at one mu, and the Morse-region classification of a
(mu, nu) point for the k = 1 block.
"""

import math
from typing import Optional

from ringbif.core.spectral import degeneracies, morse_region_classify, stability_window


def _bound(value: float) -> Optional[float]:
    return None if math.isinf(value) else value


def stability_report(n: int, check_mu: Optional[float] = None) -> dict:
    """Window (mu_floor(n/2), mu_1) and, with check_mu, the eigenvalue verdict.

    A ``None`` lower bound means the window is unbounded below (n = 3).
    """
    report = stability_window(n, check_mu)
    lower, upper = report.mu_window
    result = {
        "n": n,
        "window": {"lower": _bound(lower), "upper": upper},
        "degeneracies": [{"name": name, "mu": value} for name, value in degeneracies(n)],
    }
    if check_mu is not None:
        result["check"] = {
            "mu": report.mu,
            "inside_window": report.inside_window,
            "spectral_ok": report.spectral_ok,
            "max_real_part": report.max_real_part,
            "kernel_modulus": report.kernel_modulus,
            "root_count": report.root_count,
            "real_root_count": report.real_root_count,
        }
    return result


def region_report(n: int, mu: float, nu: float) -> dict:
    """Region label and Morse number n_1 of (mu, nu), checked against the eigenvalue count."""
    report = morse_region_classify(mu, nu, n)
    return {
        "n": report.n,
        "mu": report.mu,
        "nu": report.nu,
        "region": report.region,
        "morse_number": report.morse_number,
        "numeric_morse_index": report.numeric_morse_index,
        "consistent": report.consistent,
    }
