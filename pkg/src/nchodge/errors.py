"""Exception types shared across the package.

Every error carries a stable ``code`` string ("<area>/<Name>") so CLI
reports can identify failures without parsing messages, plus an optional
``context`` dict holding a witness (offending indices, residuals, ...).
"""

from __future__ import annotations


class NCHodgeError(Exception):
    """Base class for all package errors."""

    code = "nchodge/Error"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def report_entry(self) -> dict:
        ctx = {k: v for k, v in self.context.items()}
        return {"code": self.code, "message": str(self), "context": ctx}


# -- algebra construction --------------------------------------------------

class ShapeMismatch(NCHodgeError):
    code = "algebra-core/ShapeMismatch"


class DimMismatch(NCHodgeError):
    code = "algebra-core/DimMismatch"


class AssociativityViolation(NCHodgeError):
    code = "algebra-core/AssociativityViolation"


class UnitViolation(NCHodgeError):
    code = "algebra-core/UnitViolation"


# -- form windows ----------------------------------------------------------

class WindowTooLarge(NCHodgeError):
    code = "nc-forms/WindowTooLarge"


class DegreeOutOfWindow(NCHodgeError):
    code = "nc-forms/DegreeOutOfWindow"


# -- spectral decomposition ------------------------------------------------

class PolynomialRelationViolated(NCHodgeError):
    code = "spectral/PolynomialRelationViolated"


class NumericalRankAmbiguous(NCHodgeError):
    code = "spectral/NumericalRankAmbiguous"


class SingularOnComplement(NCHodgeError):
    code = "spectral/SingularOnComplement"


class NonUnitRootEigenvalue(NCHodgeError):
    code = "spectral/NonUnitRootEigenvalue"


# -- classical cochain complexes -------------------------------------------

class NotAComplex(NCHodgeError):
    code = "hodge-classical/NotAComplex"


class BadGram(NCHodgeError):
    code = "hodge-classical/BadGram"


class NegativeEigenvalue(NCHodgeError):
    code = "hodge-classical/NegativeEigenvalue"


# -- foliation models -------------------------------------------------------

class BadWeights(NCHodgeError):
    code = "tangential/BadWeights"


class LeafTooSmall(NCHodgeError):
    code = "tangential/LeafTooSmall"


class GridTooCoarse(NCHodgeError):
    code = "tangential/GridTooCoarse"


class NotIntegrable(NCHodgeError):
    code = "tangential/NotIntegrable"


class VanishingOmega(NCHodgeError):
    code = "tangential/VanishingOmega"


# -- command line ------------------------------------------------------------

class InputError(NCHodgeError):
    code = "cli/InputError"
