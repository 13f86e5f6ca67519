"""
ki-paramp - design, simulation and calibration toolkit for kinetic-inductance
reflection parametric amplifiers with a three-stage impedance transformer
"""

__version__ = "1.0.1"
