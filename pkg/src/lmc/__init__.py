"""Toolkit for the sequent calculus LMC of closure l-monoids."""

__version__ = "0.1.0"
