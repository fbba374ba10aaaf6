"""Selection of the number of worker threads.

Grid integrations and independent Monte Carlo chains are distributed over
:py:const:`WORKER_THREADS` workers. The count defaults to the number of
CPUs and can be overridden via the environment variable
``PHOTON_LAB_THREADS``.

"""

import os

#: number of worker threads used for partitioned computations
WORKER_THREADS: int = os.cpu_count() or 1

_threads_override = os.getenv("PHOTON_LAB_THREADS")

if _threads_override is not None:
    try:
        WORKER_THREADS = int(_threads_override)
    except ValueError as val_err:
        raise ValueError(
            "Invalid value for PHOTON_LAB_THREADS, expected an integer, got "
            f"'{_threads_override}'"
        ) from val_err

    if WORKER_THREADS < 1:
        raise ValueError(
            "PHOTON_LAB_THREADS must be at least 1, got "
            f"'{_threads_override}'"
        )
