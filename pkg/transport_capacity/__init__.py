"""
Random access transport capacity toolkit.

Computes the end-to-end throughput metric of multihop wireless networks under Poisson
interference: exactly for a finite attempt budget, in closed form for the unconstrained upper
bound, and by Monte Carlo simulation of the underlying SINR model.
"""

__version__ = "0.1.0"
