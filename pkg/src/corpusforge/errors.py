"""Shared exception base for data and validation failures."""


class CorpusForgeError(Exception):
    """Base class for all data-level errors raised by this package.

    The CLI maps these to exit code 2. Service-level errors from the
    text-generation client have their own hierarchy (exit code 3).
    """
