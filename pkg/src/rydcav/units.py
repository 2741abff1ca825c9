"""Unit conventions.

Internally hbar = 1, times are in microseconds and every frequency is an angular
frequency in rad/us.  Config files and presets quote frequencies as multiples of
2*pi*MHz (the value 6 means 2*pi x 6 MHz), which is the same number as rad/us / 2pi.
"""
import math

TWO_PI = 2.0 * math.pi


def mhz(value: float) -> float:
    """2*pi x value MHz -> rad/us."""
    return TWO_PI * value


def khz(value: float) -> float:
    """2*pi x value kHz -> rad/us."""
    return TWO_PI * value * 1e-3


def to_mhz(omega: float) -> float:
    return omega / TWO_PI


# free-space D2 decay rate of 87Rb, the scale for all decay rates
GAMMA_0 = mhz(6.0)
