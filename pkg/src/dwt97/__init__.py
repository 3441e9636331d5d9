"""Bit-exact fixed-point CDF 9/7 lifting DWT with a cycle-accurate datapath simulator."""

from dwt97.errors import PgmError, RangeError, RegisterOverflow, ShapeError

__version__ = "0.1.0"

__all__ = ["PgmError", "RangeError", "RegisterOverflow", "ShapeError", "__version__"]
