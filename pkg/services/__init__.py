"""
Solver and harness services for COPQ bench.
This package contains the encoders, classical solvers, the statevector
simulator, the variational drivers and the benchmark harness.
"""
