"""Composite-wave numerical laboratory for the bipolar Vlasov-Poisson-Boltzmann system."""

__version__ = "0.1.0"
