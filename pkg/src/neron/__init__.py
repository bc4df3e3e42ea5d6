"""Component groups of Néron models from dual graphs, with the X0(p) case worked out."""

__version__ = "0.1.0"
