"""A classical modal logic containing intuitionistic propositional logic under box."""

__version__ = "0.1.0"
