"""
Helper Functions for the transport capacity toolkit.

These are the utility functions used across the application:
    1) Logging setup
    2) Output path management
    3) JSON config loading and validation
    4) JSON-safe number conversion
"""

import json
import logging
import math
import os
from typing import Any, Dict

from .errors import ParameterError

#Every numeric CSV cell is written with this many significant digits
SIGNIFICANT_DIGITS = 12
CSV_FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"

#Field names accepted in a params JSON config
CONFIG_FIELDS = ("lambda", "alpha", "beta", "R", "rho", "eta", "snr", "rate_log_base")


def configureLogging(level: str = "WARNING", jsonFormat: bool = False) -> None:
    """
    Configure the root logger once, from the CLI only. Library modules just call
    logging.getLogger(__name__).

    jsonFormat switches to python-json-logger so runs can be piped into log tooling.
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler()
    if jsonFormat:
        from pythonjsonlogger.json import JsonFormatter

        handler.setFormatter(JsonFormatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))

    root.addHandler(handler)
    root.setLevel(level.upper())


def getOutputDirectory(outputPath: str) -> str:
    """Gets or creates the directory an output file will be written into"""
    directory = os.path.dirname(os.path.abspath(outputPath))
    os.makedirs(directory, exist_ok=True)
    return directory

def isValidParamsConfig(data: Any) -> bool:
    """Validate that a params config has the expected shape (a flat JSON object of known keys)"""
    if not isinstance(data, dict):
        return False

    unknown = [k for k in data if k not in CONFIG_FIELDS]
    if unknown:
        return False

    #eta and snr describe the same thing, only one may be given
    if "eta" in data and "snr" in data:
        return False

    return True


def loadParamsConfig(path: str) -> Dict[str, Any]:
    """
    Load a NetworkParams JSON config file.

    Returns the raw dictionary, validated for shape only; NetworkParams.fromDict does the
    physical validation.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")

    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParameterError(f"config {path} is not valid JSON: {e}") from e

    if not isValidParamsConfig(data):
        raise ParameterError(
            f"config {path} must be an object with keys from {list(CONFIG_FIELDS)} "
            "(eta and snr are mutually exclusive)"
        )
    return data


def jsonSafe(value: Any) -> Any:
    """
    Make a value JSON-serialisable without truncating numbers.

    Non-finite floats become the strings "inf", "-inf" and "nan" since strict JSON has no
    literal for them.
    """
    if isinstance(value, dict):
        return {str(k): jsonSafe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonSafe(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        #numpy scalar
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value

