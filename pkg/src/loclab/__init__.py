"""Finite-volume laboratory for random lattice Schrodinger operators.

Builds dense restrictions of H = Delta + V on cubes of Z^d, checks
Green's-function suitability and resolvent bounds, runs the cube-merging
combinatorics and scale recursions of a multi-scale analysis, verifies
Cartan-type sublevel bounds against Monte Carlo measurements, and measures
spectral statistics (integrated density of states, eigenvalue counting)
and transport moments.
"""

__version__ = "0.1.0"
