import numpy as np

from config import Config


def trial_stream(master_seed, index):
    """
    Counter-based random stream for one trial.

    The stream depends only on (master_seed, index), so any worker can rebuild
    it and results do not depend on how trials are scheduled.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed) & (2**64 - 1), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(seq))


def stream_id():
    return Config.RNG_ID


def codeword_stream(master_seed, index):
    """Stream for the transmitted message of one trial, independent of its noise stream."""
    seq = np.random.SeedSequence(entropy=int(master_seed) & (2**64 - 1), spawn_key=(int(index), 1))
    return np.random.Generator(np.random.Philox(seq))
