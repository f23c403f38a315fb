"""Downlink NOMA with randomly deployed users: Gauss-Chebyshev channel
statistics, outage and ergodic-rate analytics, and a Monte Carlo simulator
to check them against."""

__version__ = "0.1.0"
