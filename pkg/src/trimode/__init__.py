"""Nonreciprocal transport in three-mode optomechanical networks.

Subpackages and modules
-----------------------
classical
    Mean-field dynamics of one strongly driven block.
rwa
    Linear scattering of the two-block network in the rotating frame.
full
    The same network with counter-rotating terms and vacuum noise.
sweeps
    Deterministic parameter sweeps.
cli
    Command-line interface.
"""

__version__ = "0.1.0"
