"""Shared error types."""


class ZeroRowError(ValueError):
    """A row (user or item vector) has zero Euclidean norm."""

    def __init__(self, index: int, what: str = "row"):
        self.index = index
        super().__init__(f"{what} {index} has zero norm")


class ZeroVarianceError(ValueError):
    """A column is constant, so it cannot be standardized."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} has zero variance")


class ConfigError(ValueError):
    """Invalid configuration value; carries the offending key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
