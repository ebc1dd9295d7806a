import os

class Config:
    # largest supported m, N = 2^m
    M_MAX = 20
    # exhaustive ML search is limited to 2^24 codewords
    BRUTE_FORCE_MAX_DIM = 24
    # codebooks up to this many bytes are kept between brute-force calls
    CODEBOOK_CACHE_LIMIT = 1 << 24
    # scratch bytes per block while streaming an uncached codebook
    CODEBOOK_CHUNK_BYTES = 1 << 23
    # scratch bytes per block of subspaces while projecting and aggregating
    PROJECTION_CHUNK_BYTES = 1 << 23
    # scratch bytes per batch of noise words in the Monte Carlo helpers
    NOISE_BATCH_BYTES = 1 << 25
    DEFAULT_WORKERS = os.cpu_count() or 1
    TRIAL_BLOCK_SIZE = 256
    # listing more subspaces than this is refused, counting is always allowed
    ENUMERATION_LIMIT = 1 << 20
    WILSON_CONFIDENCE = 0.95
    REAL_DIGITS = 12
    RNG_ID = "numpy.Philox4x64-10:SeedSequence(master_seed).spawn_key(trial)"
