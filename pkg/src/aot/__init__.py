"""Finite Aczel models, a small proof kernel and the Clark-Boolos paradox
for abstract object theory."""

__version__ = "0.1.0"
