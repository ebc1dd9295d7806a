"""
Closed-form error bounds and noise-level maps.

Every bound is returned as a LogBound holding log2 of its value, so prefactors
like 32 N^(r+1) never get exponentiated. Bounds refuse epsilon outside the
window where they hold.
"""

import math

import numpy as np

from errors import RejectedConfig, RejectedInput, RmLabError, ValidityWindowError
from logs import setup_logging
from models import BoundsRow, LogBound
from coding.subspace import gaussian_binomial

logger = setup_logging("bounds")

LOG2E = 1 / math.log(2)


def _check_open_half(value, name):
    if not 0 < value < 0.5:
        raise RejectedInput(f"{name} must lie in (0, 0.5), got {value}")


def _check_order(r):
    if r < 2:
        raise RejectedInput(f"the bound needs r >= 2, got r={r}")


def _window(theorem, epsilon, edge):
    if not 0 < epsilon < edge:
        raise ValidityWindowError(theorem, epsilon, edge)


def _bar_edge(p, r):
    # eta(p_bar(p, r)) in closed form
    _check_open_half(p, "p")
    return (1 - 2 * p) ** (2 ** (r - 1)) / 2


def _log_odds(q):
    # ln((1-q)/q) through atanh of the bias, accurate as q approaches 1/2
    return 2 * float(np.arctanh(1 - 2 * q))


def eta(alpha):
    _check_open_half(alpha, "alpha")
    # (1 - 4a(1 - a)) / 2 without the cancellation near a = 1/2
    return (1 - 2 * alpha) ** 2 / 2


def eta_bar(p):
    _check_open_half(p, "p")
    return (1 - 2 * p) / 2


def p_level(p, j):
    """Noise level after j nested one-dimensional projections of BSC(p) noise."""
    if j < 0:
        raise RejectedInput(f"projection depth must be non-negative, got {j}")
    return (1 - (1 - 2 * p) ** (2 ** j)) / 2


def p_bar(p, r):
    _check_order(r)
    return p_level(p, r - 2)


def p_hat(p, r, k):
    if r - k - 1 < 0:
        raise RejectedInput(f"p_hat needs r - k - 1 >= 0, got r={r}, k={k}")
    q = p_level(p, r - k - 1)
    return (1 - (1 - 2 * q) ** (2 ** k - 1)) / 2


def bound_thm1(m, r, p, epsilon):
    """
    Block error bound of RPA with one-dimensional projections.

    Returns:
        LogBound: log2 of 32 N^(r+1) exp(-2^(-r-1) N epsilon^2).
    """
    _check_order(r)
    _window("thm1", epsilon, _bar_edge(p, r))
    return LogBound.of(5 + (r + 1) * m - 2.0 ** (m - r - 1) * epsilon ** 2 * LOG2E)


def bound_thm2(m, r, k, p, epsilon):
    """
    Block error bound of RPA with k-dimensional projections.

    The number of subspaces is taken exactly and only then moved to log2.
    """
    _check_order(r)
    if k < 1 or (r - 1) % k:
        raise RejectedConfig(f"k={k} must be at least 1 and divide r-1={r - 1}")
    _window("thm2", epsilon, _bar_edge(p, r))
    n = gaussian_binomial(m, k)
    q = p_level(p, r - k - 1)
    exponent = _log_odds(q) * 2.0 ** (m - r - 1 - k) * epsilon ** 2 * LOG2E
    return LogBound.of(6 + 3 * m + (r - 1) / k * math.log2(n) - exponent)


def bound_two_iter(m, p, epsilon):
    """Second-order bound after two iterations: 256 N^2 exp(-N epsilon^2 / 8)."""
    _window("two_iter", epsilon, eta(p))
    return LogBound.of(8 + 2 * m - 2.0 ** m * epsilon ** 2 / 8 * LOG2E)


def bound_single_iter(m, p, epsilon):
    """Second-order bound after one iteration: 32 N^3 exp(-N epsilon^2 / 8)."""
    _window("single_iter", epsilon, eta(p))
    return LogBound.of(5 + 3 * m - 2.0 ** m * epsilon ** 2 / 8 * LOG2E)


def bound_ml_first_order(m, p, epsilon):
    """ML failure on one projected first-order word: 8 N exp(-N epsilon^2 / 8)."""
    _window("ml_first_order", epsilon, eta(p))
    return LogBound.of(3 + m - 2.0 ** m * epsilon ** 2 / 8 * LOG2E)


def bound_all_projections(m, p, epsilon):
    """Union over all N - 1 projections of the first-order failure bound."""
    if m < 1:
        raise RejectedInput(f"m must be at least 1, got {m}")
    _window("all_projections", epsilon, eta(p))
    return LogBound.of(3 + m + math.log2((1 << m) - 1) - 2.0 ** m * epsilon ** 2 / 8 * LOG2E)


def bound_best_k(m, r, p, epsilon):
    """The k-dimensional bound at k = r - 1: N^3 2^((m-r+2)(r-1)+6) exp(-ln((1-p)/p) N epsilon^2)."""
    _check_order(r)
    _window("best_k", epsilon, _bar_edge(p, r))
    exponent = _log_odds(p) * 2.0 ** m * epsilon ** 2 * LOG2E
    return LogBound.of(3 * m + (m - r + 2) * (r - 1) + 6 - exponent)


def gamma_radius(m, r, beta):
    """Fraction gamma_m of N/2 lost from the decoding radius at fixed order r."""
    _check_order(r)
    if not 0 < beta < 1:
        raise RejectedInput(f"beta must lie in (0, 1), got {beta}")
    d = 2.0 ** (m - r)
    return (8 * (5 + m * (r + 1 + beta)) / (d * LOG2E)) ** (1 / 2 ** r)


def gamma_floor(m, r):
    _check_order(r)
    return (24 * m / (2.0 ** (m - r) * LOG2E)) ** (1 / 2 ** r)


def correctable_errors(m, r, beta, delta):
    """Number of errors N/2 (1 - gamma_m - delta) corrected with high probability."""
    if not 0 < delta < 1:
        raise RejectedInput(f"delta must lie in (0, 1), got {delta}")
    return 2.0 ** m / 2 * (1 - gamma_radius(m, r, beta) - delta)


def rate_threshold_c(p):
    """c(p) = ln 2 / ln(1 / (1 - 2p)); orders r <= log2(c m) stay in the vanishing-error regime."""
    _check_open_half(p, "p")
    return math.log(2) / -math.log1p(-2 * p)


def rho_exponent(m, r, delta, p):
    _check_open_half(p, "p")
    if not 0 < delta < 1:
        raise RejectedInput(f"delta must lie in (0, 1), got {delta}")
    return m * (r + 1) - delta * LOG2E / 8 * 2.0 ** (m - r) * (1 - 2 * p) ** (2 ** r) + 5


def rho_bar_exponent(m, r, delta, p):
    _check_open_half(p, "p")
    if not 0 < delta < 1:
        raise RejectedInput(f"delta must lie in (0, 1), got {delta}")
    decay = delta * LOG2E / 16 * _log_odds(p) * 2.0 ** m * (1 - 2 * p) ** (2 ** (r + 1))
    return (m - r + 2) * (r - 1) - decay + 3 * m + 6


def tree_children(m, k, level):
    """Children of a level-`level` node of the projection-aggregation tree, per iteration."""
    return gaussian_binomial(m - k * level, k)


def _attempt(fn, *args):
    try:
        return fn(*args)
    except RmLabError as e:
        return str(e)


def bound_table(inp, delta=0.5, beta=0.5):
    """
    Every quantity defined for one BoundInput, in a fixed key order.

    A quantity whose preconditions fail holds the diagnostic string instead of
    a number.

    Args:
        inp (BoundInput): m, r, k, p and epsilon.
        delta (float): Radius slack for rho, rho_bar and correctable_errors.
        beta (float): Exponent slack for gamma.

    Returns:
        dict: Name to float, bool, int or diagnostic string.
    """
    _check_open_half(inp.p, "p")
    m, r, k, p, eps = inp.m, inp.r, inp.k, inp.p, inp.epsilon
    table = {"m": m, "r": r, "k": k, "p": p, "epsilon": eps, "delta": delta, "beta": beta,
             "eta_p": eta(p), "eta_bar_p": eta_bar(p),
             "p_bar": _attempt(p_bar, p, r), "p_hat": _attempt(p_hat, p, r, k)}
    table["eta_p_bar"] = table["p_bar"] if isinstance(table["p_bar"], str) else eta(table["p_bar"])

    bounds = [("thm1", bound_thm1, (m, r, p, eps)),
              ("thm2", bound_thm2, (m, r, k, p, eps)),
              ("best_k", bound_best_k, (m, r, p, eps)),
              ("single_iter", bound_single_iter, (m, p, eps)),
              ("two_iter", bound_two_iter, (m, p, eps)),
              ("ml_first_order", bound_ml_first_order, (m, p, eps)),
              ("all_projections", bound_all_projections, (m, p, eps))]
    for name, fn, args in bounds:
        result = _attempt(fn, *args)
        if isinstance(result, str):
            table[f"log2_{name}"] = result
            table[f"vacuous_{name}"] = result
        else:
            table[f"log2_{name}"] = result.log2_value
            table[f"vacuous_{name}"] = result.vacuous

    table["c"] = rate_threshold_c(p)
    table["gamma"] = _attempt(gamma_radius, m, r, beta)
    table["gamma_floor"] = _attempt(gamma_floor, m, r)
    table["correctable_errors"] = _attempt(correctable_errors, m, r, beta, delta)
    table["rho"] = _attempt(rho_exponent, m, r, delta, p)
    table["rho_bar"] = _attempt(rho_bar_exponent, m, r, delta, p)
    table["tree_children"] = _attempt(tree_children, m, k, 0)
    logger.debug(f"Bound table for m={m} r={r} k={k} p={p} epsilon={eps}: {len(table)} entries")
    return table


def _number(value):
    return None if isinstance(value, str) else value


def bounds_row(inp, delta=0.5, beta=0.5):
    """One sweep row; quantities outside their window are left empty."""
    table = bound_table(inp, delta, beta)
    return BoundsRow(m=inp.m, r=inp.r, k=inp.k, p=inp.p, epsilon=inp.epsilon,
                     log2_thm1=_number(table["log2_thm1"]), log2_thm2=_number(table["log2_thm2"]),
                     gamma=_number(table["gamma"]), rho=_number(table["rho"]),
                     rho_bar=_number(table["rho_bar"]),
                     vacuous_thm1=_number(table["vacuous_thm1"]),
                     vacuous_thm2=_number(table["vacuous_thm2"]))
