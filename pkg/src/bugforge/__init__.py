"""bugforge: desk-scale learned program repair for Java methods."""

__version__ = "0.1.0"
