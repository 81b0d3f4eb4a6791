"""mmwrelay: dual-hop mmWave vehicular DF relay reliability toolkit.

Two engines live here: closed-form reliability expressions (outage, symbol
error, capacity and their asymptotes/bounds) for Nakagami fading with
outdated CSI, co-channel interference and blockage, and an independent
Monte Carlo link simulator used to validate every expression.
"""

__version__ = "0.1.0"
