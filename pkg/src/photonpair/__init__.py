"""Design and analysis of heralded single-photon sources based on pulsed PDC."""

__version__ = "0.1.0"
