"""Automatic structures workbench: presentations, FO(Einf) model checking, diagnostics."""

__version__ = "0.1.0"
