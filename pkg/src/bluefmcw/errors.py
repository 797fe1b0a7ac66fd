"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid chirp, scenario or campaign configuration.

    ``key`` holds the dotted path of the offending setting when known,
    e.g. ``"chirp.n_sub"``.
    """

    def __init__(self, message, key=None):
        self.key = key
        if key:
            message = f"{key}: {message}"
        super().__init__(message)
