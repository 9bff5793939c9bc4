"""Normal-basis valuation criterion for elementary abelian p-extensions of local fields."""

__version__ = "0.1.0"
