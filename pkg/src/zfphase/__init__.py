"""Phase limitations of Zames-Falb multipliers and Lur'e system counterexamples."""

__version__ = '0.1.0'

from ._common import Klass, PhaseLimit, Sign  # noqa: E402
from .lti import Domain, TransferFunction, freq_response, nyquist_value, phase_deg  # noqa: E402

__all__ = ['Klass', 'PhaseLimit', 'Sign', 'Domain', 'TransferFunction', 'freq_response',
           'nyquist_value', 'phase_deg', '__version__']
