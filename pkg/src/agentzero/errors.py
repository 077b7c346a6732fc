class ConfigError(ValueError):
    """Invalid configuration value; always names the offending key."""

    def __init__(self, key: str, constraint: str, value=None):
        self.key = key
        self.constraint = constraint
        self.value = value
        msg = f"{key}: {constraint}"
        if value is not None:
            msg += f" (got {value!r})"
        super().__init__(msg)
