"""Error taxonomy shared across the package.

Four failure families, mapped to CLI exit codes by the command layer:
input/config/state errors -> exit 2, engine errors -> exit 3.
"""


class AutoslabError(Exception):
    """Base class for all package errors."""


class InputError(AutoslabError):
    """Malformed or inconsistent user data (bad columns, non-binary outcomes, ...)."""


class ConfigError(AutoslabError):
    """Invalid configuration (out-of-range hyperparameters, unknown keys, bad presets)."""


class StateError(AutoslabError):
    """Operation applied to an object in the wrong state (e.g. predicting from an unfitted model)."""


class EngineError(AutoslabError):
    """Numerical failure inside an inference engine (NaN ELBO, non-finite gradient, ...)."""
