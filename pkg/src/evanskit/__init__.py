"""Evans-function stability toolkit for multisymplectic PDEs on the line."""

__version__ = "0.1.0"
