class StimforgeError(Exception):
    """Raised for every library error. `code` is the error name, e.g. "validation_error"."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
