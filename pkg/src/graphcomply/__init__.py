"""Compliance checking of object-based graphs against class-based graphs."""

__version__ = "0.1.0"
