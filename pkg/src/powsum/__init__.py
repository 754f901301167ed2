"""Rigorous verification of power-sum inequalities."""

__version__ = "0.1.0"
