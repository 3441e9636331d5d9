class RangeError(ValueError):
    """A value lies outside the range an operation accepts."""


class ShapeError(ValueError):
    """Array length or plane dimensions are unusable (odd, mismatched, too small)."""


class RegisterOverflow(RangeError):
    """A simulated register received a value outside its declared range."""

    def __init__(self, register, value, cycle, declared_range):
        self.register = register
        self.value = value
        self.cycle = cycle
        self.declared_range = declared_range
        lo, hi = declared_range
        super().__init__(
            f"register {register!r} overflow at cycle {cycle}: {value} not in [{lo}, {hi}]"
        )


class PgmError(ValueError):
    """Malformed or unsupported PGM input."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")
