from itertools import combinations

import numpy as np

from errors import RejectedConfig, RejectedInput
from logs import setup_logging
from models import CodeParams, DecodeOutcome, OracleCheck, RpaConfig, TraceIteration, TraceNode
from coding.fht_ml import brute_force_ml, decode_first_order_batch, estimate_to_word, ml_decode_first_order
from coding.subspace import coset_indices, project, project_chunks, projection_tables
from coding.words import as_word, check_length, hamming_distance, hamming_weight

logger = setup_logging("rpa")


def check_config(cfg):
    """Raise RejectedConfig unless the recursion of cfg bottoms out at first-order codes."""
    m, r, k = cfg.params.m, cfg.params.r, cfg.k
    if k < 1:
        raise RejectedConfig(f"k must be at least 1, got {k}")
    if cfg.max_iter < 1:
        raise RejectedConfig(f"max_iter must be at least 1, got {cfg.max_iter}")
    if r > 1:
        if (r - 1) % k:
            raise RejectedConfig(f"k={k} does not divide r-1={r - 1} for {cfg.params}")
        if k > m - 1:
            raise RejectedConfig(f"k={k} leaves no room to project {cfg.params}")


def make_config(params, k=1, max_iter=None):
    """
    Build a validated decoder configuration.

    Args:
        params (CodeParams): The code to decode.
        k (int): Projection subspace dimension.
        max_iter (int): Iteration cap per recursion node, defaults to m.

    Returns:
        RpaConfig: The checked configuration.
    """
    cfg = RpaConfig(params=params, k=k, max_iter=params.m if max_iter is None else max_iter)
    check_config(cfg)
    return cfg


def _disagreements(raw, decoded, index_of):
    return np.take_along_axis(raw != decoded, index_of, axis=1).sum(axis=0, dtype=np.int64)


def _flip(y, phi, n):
    return (y ^ (2 * phi > n)).astype(np.uint8)


def disagreement_counts(y, decoded_projections, maps):
    """phi(x): how many decoded projections disagree with y's projection on the coset of x."""
    y = as_word(y)
    if len(decoded_projections) != len(maps) or not maps:
        raise RejectedInput(f"got {len(decoded_projections)} decoded projections for {len(maps)} coset maps")
    decoded = [as_word(w) for w in decoded_projections]
    raw = [project(y, cmap) for cmap in maps]
    for got, want in zip(decoded, raw):
        check_length(got, len(want))
    index_of = np.stack([cmap.index_of for cmap in maps])
    return _disagreements(np.stack(raw), np.stack(decoded), index_of)


def aggregate(y, decoded_projections, maps):
    """
    Combine decoded projections into a new estimate of y.

    Bit x flips iff strictly more than half of the subspaces disagree with y on
    the coset of x.
    """
    phi = disagreement_counts(y, decoded_projections, maps)
    return _flip(as_word(y), phi, len(maps))


def _leaf(level, params, y, estimate):
    return TraceNode(level=level, code=params,
                     per_iteration=[TraceIteration(flip_count=hamming_distance(y, estimate))])


def _decode_rows(raw, child, k, max_iter, level, want_trace):
    """Decode a block of projections; returns (decoded, ml_ties, trace children)."""
    if child.r == 1:
        decoded, ties = decode_first_order_batch(raw)
        children = [_leaf(level, child, raw[i], decoded[i]) for i in range(len(raw))] if want_trace else []
        return decoded, ties, children
    decoded = np.empty_like(raw)
    ties, children = 0, []
    for i in range(len(raw)):
        out = _decode(raw[i], child, k, max_iter, level, want_trace)
        decoded[i] = out[0]
        ties += out[3]
        if want_trace:
            children.append(out[5])
    return decoded, ties, children


def _decode(y, params, k, max_iter, level, want_trace):
    """Returns (estimate, converged, iterations_used, ml_ties, flip_counts, trace node or None)."""
    m, r = params.m, params.r
    if r == 0:
        weight = hamming_weight(y)
        estimate = np.full(len(y), 1 if 2 * weight > len(y) else 0, dtype=np.uint8)
        node = _leaf(level, params, y, estimate) if want_trace else None
        return estimate, True, 1, int(2 * weight == len(y)), [hamming_distance(y, estimate)], node
    if r == 1:
        e = ml_decode_first_order(y)
        estimate = estimate_to_word(e, m)
        node = _leaf(level, params, y, estimate) if want_trace else None
        return estimate, True, 1, int(e.tied), [hamming_distance(y, estimate)], node

    tables = projection_tables(m, k)
    child = CodeParams(m - k, r - k)
    current = y.copy()
    node = TraceNode(level=level, code=params) if want_trace else None
    ties, flips, converged, used = 0, [], False, 0

    for used in range(1, max_iter + 1):
        phi = np.zeros(len(current), dtype=np.int64)
        children = []
        for start, stop, raw in project_chunks(current, tables):
            decoded, tied, nodes = _decode_rows(raw, child, k, max_iter, level + 1, want_trace)
            ties += tied
            children.extend(nodes)
            phi += _disagreements(raw, decoded, coset_indices(tables, start, stop))

        updated = _flip(current, phi, len(tables.maps))
        flip_count = int(np.count_nonzero(updated != current))
        flips.append(flip_count)
        if want_trace:
            node.per_iteration.append(TraceIteration(flip_count=flip_count, children=children))
        current = updated
        if flip_count == 0:
            converged = True
            break

    if level == 0:
        logger.debug(f"{params} k={k}: {used} iterations, converged={converged}, flips={flips}")
    return current, converged, used, ties, flips, node


def rpa_decode(y, cfg, trace=False):
    """
    Recursive projection-aggregation decoding of y.

    Each iteration projects the current word onto every k-dimensional subspace,
    decodes the projections (recursively, or by first-order ML once the order
    reaches 1), and aggregates. Decoding stops early at a fixed point.

    Args:
        y (Word): Received word of length 2^m.
        cfg (RpaConfig): Code, k and iteration cap.
        trace (bool): Also record the projection-aggregation tree.

    Returns:
        DecodeOutcome: The last iterate and how it was reached.
    """
    check_config(cfg)
    y = as_word(y)
    check_length(y, cfg.params.n)
    estimate, converged, used, ties, flips, node = _decode(y, cfg.params, cfg.k, cfg.max_iter, 0, trace)
    return DecodeOutcome(estimate=estimate, converged=converged, iterations_used=used,
                         trace=node, ml_ties=ties, flip_counts=flips)


def decode_with_oracle_check(y, cfg):
    """Run RPA and exhaustive ML on the same word and report whether they agree."""
    outcome = rpa_decode(y, cfg)
    ml = brute_force_ml(y, cfg.params)
    return OracleCheck(rpa=outcome, ml=ml, agree=bool(np.array_equal(outcome.estimate, ml)))


def measure_radius(cfg, codeword, max_weight):
    """
    Largest t <= max_weight such that every error pattern of weight <= t on
    codeword is decoded back to it.
    """
    codeword = as_word(codeword)
    check_length(codeword, cfg.params.n)
    for t in range(1, max_weight + 1):
        for positions in combinations(range(cfg.params.n), t):
            y = codeword.copy()
            y[list(positions)] ^= 1
            if not np.array_equal(rpa_decode(y, cfg).estimate, codeword):
                logger.info(f"{cfg.params} k={cfg.k}: weight-{t} pattern at {positions} not corrected")
                return t - 1
    return max_weight
