"""Forward-only OTOC protocol simulator for the classical and quantum driven top."""

__version__ = "0.1.0"
