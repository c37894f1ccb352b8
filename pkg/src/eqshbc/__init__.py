"""Lumped capacitive channel models for body-coupled (EQS) communication near metal."""

__version__ = "0.1.0"
