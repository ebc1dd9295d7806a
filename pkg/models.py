from typing import Optional

import msgspec
import numpy as np

from config import Config
from errors import RejectedInput
from coding.words import to_ascii


class CodeParams(msgspec.Struct, frozen=True):
    """The pair (m, r) naming RM(m, r)."""

    m: int
    r: int

    def __post_init__(self):
        if not 1 <= self.m <= Config.M_MAX:
            raise RejectedInput(f"m must lie in [1, {Config.M_MAX}], got {self.m}")
        if not 0 <= self.r <= self.m:
            raise RejectedInput(f"r must lie in [0, m={self.m}], got {self.r}")

    @property
    def n(self):
        return 1 << self.m

    def __str__(self):
        return f"RM({self.m},{self.r})"


class FirstOrderEstimate(msgspec.Struct, frozen=True):
    # codeword sigma * chi_s; tied is set when another (s, sigma) scored the same
    s: int
    sigma: int
    tied: bool = False


class RpaConfig(msgspec.Struct, frozen=True):
    params: CodeParams
    k: int
    max_iter: int


class TraceIteration(msgspec.Struct):
    flip_count: int
    children: list["TraceNode"] = msgspec.field(default_factory=list)


class TraceNode(msgspec.Struct):
    level: int
    code: CodeParams
    per_iteration: list[TraceIteration] = msgspec.field(default_factory=list)


class DecodeOutcome(msgspec.Struct):
    estimate: np.ndarray
    converged: bool
    iterations_used: int
    trace: Optional[TraceNode] = None
    ml_ties: int = 0
    flip_counts: list[int] = msgspec.field(default_factory=list)


class OracleCheck(msgspec.Struct):
    rpa: DecodeOutcome
    ml: np.ndarray
    agree: bool


class LogBound(msgspec.Struct, frozen=True):
    log2_value: float
    vacuous: bool

    @classmethod
    def of(cls, log2_value):
        return cls(log2_value=float(log2_value), vacuous=bool(log2_value >= 0))


class BoundInput(msgspec.Struct, frozen=True):
    m: int
    r: int
    k: int
    p: float
    epsilon: float


class BoundsRow(msgspec.Struct, frozen=True):
    # None where the quantity is undefined or outside its validity window
    m: int
    r: int
    k: int
    p: float
    epsilon: float
    log2_thm1: Optional[float]
    log2_thm2: Optional[float]
    gamma: Optional[float]
    rho: Optional[float]
    rho_bar: Optional[float]
    vacuous_thm1: Optional[bool]
    vacuous_thm2: Optional[bool]


class TrialConfig(msgspec.Struct, frozen=True):
    code: CodeParams
    k: int
    p: float
    max_iter: int
    num_trials: int
    master_seed: int
    workers: int = 1
    zero_codeword: bool = False


class TrialResult(msgspec.Struct, frozen=True):
    trials: int
    block_errors: int
    p_err_hat: float
    ci_low: float
    ci_high: float
    converged_fraction: float
    mean_iterations: float
    ml_ties: int = 0
    # trials whose decoding met a tie anywhere, and block errors among the others
    tied_trials: int = 0
    tie_free_errors: int = 0
    rng: str = Config.RNG_ID


class NoiseTestResult(msgspec.Struct, frozen=True):
    empirical: float
    expected: float
    z_score: float
    correlation: float = 0.0
    correlation_z: float = 0.0


class Subspace(msgspec.Struct, frozen=True, order=True):
    """
    A k-dimensional subspace of F2^m held by its reduced-row-echelon basis.

    Basis vectors are integers (z_1 most significant), ordered by leading bit,
    highest first. Two values are equal iff they span the same subspace.
    """

    ambient_m: int
    dim_k: int
    basis: tuple[int, ...]

    @property
    def elements(self):
        elems = np.zeros(1, dtype=np.int64)
        for b in self.basis:
            elems = np.concatenate([elems, elems ^ b])
        return elems


class CosetIndexMap(msgspec.Struct, frozen=True, eq=False):
    """
    Linear quotient map F2^m -> F2^(m-k) for one subspace.

    images[j] is the coset index of the standard vector e_(j+1). Complement
    vector i lands on coset bit m-k-1-i, so it is the representative of that
    single-bit coset.
    """

    subspace: Subspace
    complement_basis: tuple[int, ...]
    images: tuple[int, ...]

    @property
    def index_of(self):
        """Coset index of every point z."""
        m = self.subspace.ambient_m
        points = np.arange(1 << m, dtype=np.int64)
        index_of = np.zeros(1 << m, dtype=np.int64)
        for j, image in enumerate(self.images):
            index_of ^= ((points >> (m - 1 - j)) & 1) * image
        return index_of

    @property
    def members(self):
        """members[t]: the 2^k points of coset t, increasing."""
        reps = np.zeros(1, dtype=np.int64)
        for c in reversed(self.complement_basis):
            reps = np.concatenate([reps, reps ^ c])
        return np.sort(reps[:, None] ^ self.subspace.elements[None, :], axis=1)


class ProjectionTables(msgspec.Struct, frozen=True, eq=False):
    """
    Every k-dimensional subspace of F2^m, one row per subspace.

    images, complements and elements hold each map's fields as int32 rows so
    that coset tables can be rebuilt for a block of subspaces at a time.
    """

    m: int
    k: int
    maps: tuple[CosetIndexMap, ...]
    images: np.ndarray
    complements: np.ndarray
    elements: np.ndarray


def _enc_hook(obj):
    if isinstance(obj, np.ndarray):
        return to_ascii(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    raise NotImplementedError(f"Objects of type {type(obj)} are not supported")


def _round(value, digits):
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: _round(v, digits) for k, v in value.items()}
    if isinstance(value, list):
        return [_round(v, digits) for v in value]
    return value


def encode_json(record, digits=Config.REAL_DIGITS):
    """Serialize any record above (numpy words become 0/1 strings, reals keep `digits` significant digits)."""
    return msgspec.json.encode(_round(msgspec.to_builtins(record, enc_hook=_enc_hook), digits))
