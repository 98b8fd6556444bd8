"""Migration-based synchronization toolkit.

Critical sections execute on dedicated synchronization cores instead of
migrating shared data between cores.  Subpackages: ``runtime`` (sync-core
executors, mutexes, baseline locks), ``bench`` (latency/counter
microbenchmarks), ``analysis`` (blocking bounds and response-time analysis),
``sim`` (validating scheduler simulator), plus a ``mbs`` command-line tool.
"""

__version__ = "0.1.0"
