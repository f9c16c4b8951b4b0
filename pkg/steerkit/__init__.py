"""Two-sided certification of EPR steering for two-qubit states."""

__version__ = "1.0.0"
