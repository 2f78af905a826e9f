"""Spectral invariants of p-adic automorphic forms on quaternionic arithmetic
groups: harmonic cocycles on the Bruhat-Tits tree, overconvergent moment
lifting, Coleman-style integration, and the resulting L-operator with its
eigenvalue valuations (slope tables) and L-invariants."""

__version__ = "0.1.0"
