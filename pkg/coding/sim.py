import math

import numpy as np
from scipy.stats import norm

from config import Config
from errors import RejectedConfig, RejectedInput
from logs import setup_logging
from models import NoiseTestResult, TrialResult
from coding.bounds import p_level
from coding.fht_ml import brute_force_search
from coding.rm_core import dimension, encode
from coding.rpa import make_config, rpa_decode
from coding.streams import codeword_stream, stream_id, trial_stream
from coding.subspace import project, subspace_chain
from coding.words import as_word
from workers import run_blocks, split_blocks

logger = setup_logging("sim")


def bsc_transmit(c, p, rng):
    """Flip each bit of c independently with probability p, drawing from rng."""
    if not 0 <= p <= 1:
        raise RejectedInput(f"crossover probability must lie in [0, 1], got {p}")
    c = as_word(c)
    return c ^ (rng.random(len(c)) < p).astype(np.uint8)


def wilson_interval(successes, trials, confidence=None):
    """
    Wilson score interval for a binomial proportion.

    The interval is widened if needed so that it always contains the point estimate.
    """
    confidence = confidence or Config.WILSON_CONFIDENCE
    z = float(norm.ppf(1 - (1 - confidence) / 2))
    p_hat = successes / trials
    scale = 1 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / scale
    half = z / scale * math.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4 * trials * trials))
    return min(max(0.0, center - half), p_hat), max(min(1.0, center + half), p_hat)


def _check(cfg):
    if not 0 <= cfg.p <= 0.5:
        raise RejectedConfig(f"p must lie in [0, 0.5], got {cfg.p}")
    if cfg.num_trials < 1:
        raise RejectedConfig(f"num_trials must be at least 1, got {cfg.num_trials}")
    if cfg.workers < 1:
        raise RejectedConfig(f"workers must be at least 1, got {cfg.workers}")


def _transmitted(cfg, trial):
    if cfg.zero_codeword:
        return np.zeros(cfg.code.n, dtype=np.uint8)
    rng = codeword_stream(cfg.master_seed, trial)
    return encode(rng.integers(0, 2, dimension(cfg.code), dtype=np.uint8), cfg.code)


class _TrialJob:
    """
    Decode the trials of one block and total them up.

    Worker processes receive it pickled, so it holds nothing but the configs.
    """

    def __init__(self, cfg, ml=False):
        self.cfg = cfg
        self.ml = ml
        self.rpa_cfg = None if ml else make_config(cfg.code, cfg.k, cfg.max_iter)

    def decode(self, y):
        if self.ml:
            word, tied = brute_force_search(y, self.cfg.code)
            return word, True, 1, int(tied)
        outcome = rpa_decode(y, self.rpa_cfg)
        return outcome.estimate, outcome.converged, outcome.iterations_used, outcome.ml_ties

    def __call__(self, block):
        cfg = self.cfg
        errors = converged = iterations = ties = tied_trials = tie_free_errors = 0
        for trial in range(*block):
            rng = trial_stream(cfg.master_seed, trial)
            c = _transmitted(cfg, trial)
            estimate, done, used, tied = self.decode(bsc_transmit(c, cfg.p, rng))
            wrong = not np.array_equal(estimate, c)
            errors += wrong
            converged += done
            iterations += used
            ties += tied
            tied_trials += tied > 0
            tie_free_errors += wrong and not tied
        return errors, converged, iterations, ties, tied_trials, tie_free_errors


def _run(cfg, ml):
    logger.info(f"Simulating {cfg.num_trials} trials of {cfg.code} at p={cfg.p}, seed {cfg.master_seed}")
    parts = run_blocks(_TrialJob(cfg, ml), split_blocks(cfg.num_trials), cfg.workers)
    errors, converged, iterations, ties, tied_trials, tie_free_errors = (sum(col) for col in zip(*parts))
    low, high = wilson_interval(errors, cfg.num_trials)
    result = TrialResult(trials=cfg.num_trials, block_errors=errors, p_err_hat=errors / cfg.num_trials,
                         ci_low=low, ci_high=high, converged_fraction=converged / cfg.num_trials,
                         mean_iterations=iterations / cfg.num_trials, ml_ties=ties,
                         tied_trials=tied_trials, tie_free_errors=tie_free_errors, rng=stream_id())
    logger.info(f"{cfg.code} at p={cfg.p}: {errors}/{cfg.num_trials} block errors, {tied_trials} trials met a tie")
    return result


def run_trials(cfg):
    """
    Monte Carlo block error rate of RPA decoding over BSC(p).

    Each trial sends a uniformly random codeword (the all-zero word when
    cfg.zero_codeword is set). Trial t draws its noise and message from streams
    keyed by (master_seed, t), so the result does not depend on cfg.workers.
    Trials that never met a tie decode the same way whatever codeword was sent,
    so tied_trials and tie_free_errors agree between the two settings.
    """
    _check(cfg)
    return _run(cfg, ml=False)


def run_ml_trials(cfg):
    """The run_trials harness with exhaustive ML decoding in place of RPA."""
    _check(cfg)
    return _run(cfg, ml=True)


def projection_noise_test(m, k, j, p, samples, master_seed, batch=4096):
    """
    Check that j nested k-dimensional projections of BSC(p) noise look like BSC(p_level(p, j*k)).

    Also reports the sample correlation between projected coordinates 0 and 1,
    with correlation_z its size in units of the null standard error 1/sqrt(samples).

    Returns:
        NoiseTestResult: Fraction of ones against the expected level, as a z-score.
    """
    if not 0 <= p <= 1:
        raise RejectedInput(f"p must lie in [0, 1], got {p}")
    if samples < 1:
        raise RejectedInput(f"samples must be at least 1, got {samples}")
    chain = subspace_chain(m, k, j)
    batch = max(1, min(batch, Config.NOISE_BATCH_BYTES // (8 << m)))
    length = 1 << (m - j * k)
    ones, sums = 0, np.zeros(5)
    for index, first in enumerate(range(0, samples, batch)):
        count = min(batch, samples - first)
        rng = trial_stream(master_seed, index)
        noise = (rng.random((count, 1 << m)) < p).astype(np.uint8)
        for cmap in chain:
            noise = project(noise, cmap)
        ones += int(noise.sum())
        a, b = noise[:, 0].astype(np.float64), noise[:, 1].astype(np.float64)
        sums += [a.sum(), b.sum(), (a * a).sum(), (b * b).sum(), (a * b).sum()]

    empirical = ones / (samples * length)
    expected = p_level(p, j * k)
    spread = math.sqrt(expected * (1 - expected) / (samples * length))
    z_score = (empirical - expected) / spread if spread > 0 else 0.0

    mean_a, mean_b = sums[0] / samples, sums[1] / samples
    var_a, var_b = sums[2] / samples - mean_a ** 2, sums[3] / samples - mean_b ** 2
    cov = sums[4] / samples - mean_a * mean_b
    correlation = float(cov / math.sqrt(var_a * var_b)) if var_a > 0 and var_b > 0 else 0.0
    logger.info(f"Projected noise m={m} k={k} j={j} p={p}: {empirical:.6f} vs {expected:.6f} (z={z_score:.3f})")
    return NoiseTestResult(empirical=empirical, expected=expected, z_score=z_score,
                           correlation=correlation, correlation_z=correlation * math.sqrt(samples))
