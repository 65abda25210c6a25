import os
import re

import numpy as np

THREADS_ENV_VAR = "GRAPHBAND_THREADS"


def file_safe_name(name):
    return re.sub(r"[^\w.-]", "", re.sub(r"\s", "_", name))


def derive_rng(master_seed, *keys):
    """A numpy Generator whose stream depends only on (master_seed, *keys)."""
    return np.random.default_rng(np.random.SeedSequence([master_seed] + list(keys)))


def thread_cap(environ=None):
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ceil_log2(n):
    """Exact ceil(log2 n) for a positive integer n."""
    return (int(n) - 1).bit_length()
