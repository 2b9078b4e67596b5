"""Finite element analysis of sandwich plates with CNT-reinforced facesheets."""

__version__ = "0.1.0"
