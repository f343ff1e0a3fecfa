"""Two-qubit classical and quantum correlation dynamics."""
import json

try:
    from . import _spincorr as _core
except ImportError:  # running from a build tree with the module on sys.path
    import _spincorr as _core

from_core = (
    "BellCoeffs", "CorrelationReport", "ErrorBars", "MeasurementBasis",
    "InvalidState", "ConfigError", "DomainError", "NumericalFailure",
    "analyze", "mutual_information", "classical_correlation", "quantum_discord", "geometric_discord",
    "error_bars", "bell_state", "bell_coefficients", "mutual_information_bell", "classical_correlation_bell",
    "discord_bell", "geometric_discord_bell", "critical_time", "thermal_state",
)
globals().update({name: getattr(_core, name) for name in from_core})


def _config(config):
    return "" if config is None else json.dumps(config)


def prepared_state(config=None):
    return _core.prepared_state(_config(config))


def _experiment(fn, config):
    csv, summary = fn(_config(config))
    return csv, json.loads(summary)


def free_decay(config=None):
    """Returns (csv_text, summary_dict)."""
    return _experiment(_core._free_decay, config)


def dd_preserve(config=None):
    return _experiment(_core._dd_preserve, config)


def revival(config=None):
    return _experiment(_core._revival, config)


def state_prep(config=None):
    """Returns (stage_dump_text, summary_dict)."""
    return _experiment(_core._state_prep, config)


__all__ = list(from_core) + ["prepared_state", "free_decay", "dd_preserve", "revival", "state_prep"]
