"""
Support methods for spreading independent work (records, folds, forest trees) over worker processes.

Results never depend on how many workers ran: each task carries everything it needs, including
its own seed, and results are always collected back in submission order.
"""

import logging
import multiprocessing
import os


log = logging.getLogger(__name__)

# Environment variable consulted when no explicit job count is given.
JOBS_ENVIRONMENT_VARIABLE = 'VITALSIGN_JOBS'

_MASK64 = (1 << 64) - 1


def splitmix64(value):
    """ One step of the splitmix64 generator; a cheap, well-mixed 64-bit hash. """

    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed, index):
    """ Derives the seed for task `index` of a run seeded with `seed`.

    Used wherever work is split into independently-seeded pieces (patients, folds, trees), so each
    piece draws the same random numbers whether it runs first, last, or in another process.
    """
    return splitmix64((int(seed) & _MASK64) ^ splitmix64(int(index) & _MASK64))


def resolve_jobs(jobs=None, environ=None):
    """ Returns the worker count to use: the explicit value, else $VITALSIGN_JOBS, else 1. """

    environ = os.environ if environ is None else environ

    if jobs is None:
        jobs = environ.get(JOBS_ENVIRONMENT_VARIABLE) or 1

    try:
        jobs = int(jobs)
    except ValueError:
        raise ValueError("job count must be an integer, not {!r}".format(jobs)) from None

    if jobs < 1:
        raise ValueError("job count must be at least 1")

    return jobs


class WorkerPool:
    """
    Thin wrapper around a multiprocessing pool that degrades to a plain loop for a single job.

    Tasks must be picklable: a module-level function (or functools.partial of one) and picklable items.
    """

    def __init__(self, jobs=1):
        self.jobs = resolve_jobs(jobs)


    def map(self, function, items):
        """ Applies function to every item; returns the results in the order of `items`. """

        items = list(items)

        # Don't pay for process start-up if there's nothing to parallelize.
        if self.jobs == 1 or len(items) < 2:
            return [function(item) for item in items]

        processes = min(self.jobs, len(items))
        chunksize = max(1, len(items) // (processes * 4))

        log.debug("mapping %d tasks over %d worker processes", len(items), processes)
        with multiprocessing.get_context().Pool(processes=processes) as pool:
            return pool.map(function, items, chunksize=chunksize)
