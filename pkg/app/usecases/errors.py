"""Usecase-level exceptions mapped to CLI exit status."""


class UsecaseError(Exception):
    """Base exception for usecase errors."""


class ConfigError(UsecaseError):
    """Invalid run configuration (unknown key, bad value). Exit status 1."""


class ArtifactNotFoundError(UsecaseError):
    """An upstream artifact required by the command does not exist."""
