"""3SAT to QUBO reductions, structure metrics, classical samplers and a benchmark harness."""

__version__ = "0.1.0"
