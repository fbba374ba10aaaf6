"""Physical constants shared by every module of :py:mod:`photon_lab`.

All values are SI. The defining constants of the 2019 SI are exact and are
taken from :py:mod:`scipy.constants`; the import time assertions guard
against a scipy release that changes them silently.

"""

import math

from scipy import constants as _codata

#: Identifier of the constant set, embedded in every run manifest
CONSTANT_SET = "SI-2019-exact+CODATA-2022-alpha"

#: Planck constant :math:`h` in J·s
PLANCK: float = _codata.h

#: reduced Planck constant :math:`\hbar = h / 2\pi` in J·s
HBAR: float = _codata.hbar

#: Boltzmann constant :math:`k` in J/K
BOLTZMANN: float = _codata.k

#: speed of light in vacuum in m/s
SPEED_OF_LIGHT: float = _codata.c

#: fine-structure constant :math:`\alpha`, frozen at the CODATA 2022 value
FINE_STRUCTURE: float = 7.2973525643e-3

assert PLANCK == 6.62607015e-34
assert BOLTZMANN == 1.380649e-23
assert SPEED_OF_LIGHT == 299792458.0
assert math.isclose(HBAR, PLANCK / (2 * math.pi), rel_tol=1e-15)


def radiation_constant() -> float:
    """Returns the radiation constant :math:`a = 8\\pi^5 k^4 / 15 c^3 h^3`
    in J·m⁻³·K⁻⁴, computed from the closed form.

    """
    return (
        8
        * math.pi**5
        * BOLTZMANN**4
        / (15 * SPEED_OF_LIGHT**3 * PLANCK**3)
    )
