"""
Foutklassen voor de sensing bibliotheek.
"""

from typing import List, Optional


class ParameterError(ValueError):
    """Ongeldige parameter of invoer voor een operatie."""


class ConfigError(ParameterError):
    """
    Ongeldig configuratiebestand.

    Attributes:
        diagnostics: Lijst van meldingen, elk met regelnummer of veldpad
    """

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        self.diagnostics = list(diagnostics or [])
        if self.diagnostics:
            message = message + ":\n" + "\n".join(f"  - {d}" for d in self.diagnostics)
        super().__init__(message)


class NumericError(ArithmeticError):
    """Numeriek probleem, bijvoorbeeld niet-eindige matrix elementen."""


class DegenerateCovarianceError(NumericError):
    """Covariantiematrix met kleinste eigenwaarde <= 0."""


class SampleFileError(ValueError):
    """Onleesbaar of afgekapt I/Q bestand."""
