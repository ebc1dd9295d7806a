from concurrent.futures import ProcessPoolExecutor
from functools import partial
import time

from config import Config
from logs import setup_logging

logger = setup_logging("trial_workers")


def split_blocks(total, block_size=None):
    """Cut range(total) into consecutive (start, stop) blocks."""
    block_size = block_size or Config.TRIAL_BLOCK_SIZE
    return [(start, min(start + block_size, total)) for start in range(0, total, block_size)]


def _timed(job, block):
    start = time.perf_counter()
    result = job(block)
    logger.debug(f"Block {block} finished in {time.perf_counter() - start:.3f}s")
    return result


def run_blocks(job, blocks, max_workers=1):
    """
    Run job on every block and return the results in block order.

    Args:
        job (callable): Takes one block and returns its partial result. It must
            depend on nothing but the block so the schedule cannot change results,
            and it must be picklable when max_workers > 1.
        blocks (list): The blocks, e.g. from split_blocks.
        max_workers (int): Worker processes to use; 1 runs inline.

    Returns:
        list: One result per block, in the order of blocks.
    """
    logger.info(f"Running {len(blocks)} blocks on {max_workers} worker(s)")
    if max_workers <= 1 or len(blocks) <= 1:
        return [_timed(job, block) for block in blocks]
    with ProcessPoolExecutor(max_workers=min(max_workers, len(blocks))) as pool:
        try:
            return list(pool.map(partial(_timed, job), blocks))
        except Exception as e:
            logger.error(f"Block job failed: {str(e)}", exc_info=True)
            raise
