"""Even multiparticle spacetime algebra for dipolar-coupled spin-1/2 systems."""

__version__ = "0.1.0"
