"""
Configuration management for persistence-cdga.
"""

import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

logger = logging.getLogger(__name__)

# Default configuration
DEFAULT_CONFIG: Dict[str, Any] = {
    "engine": {
        "field": "Q",  # "Q" or "Q(i)"; a model's [field] section wins unless --field is given
        "cap_margin": 3,  # cohomology cap = largest generator degree + cap_margin
        "t_degree_cap": 8,  # highest power of t allowed in homotopies
    },
    "obstruction": {
        "eps_max": 4,  # default upper end of the lower-bound scan
        # Constraint solver: witness search only when few unknowns survive
        "max_witness_variables": 4,
        "witness_values": [0, 1, -1],  # ±i are added over Q(i)
    },
    "output": {
        "json": False,  # structured output by default
    },
}


def get_config_dir() -> Path:
    """Get the configuration directory for persistence-cdga."""
    if os.name == "nt":  # Windows
        base = Path(os.environ.get("LOCALAPPDATA", Path.home() / "AppData" / "Local"))
    elif os.name == "posix":
        if "darwin" in os.uname().sysname.lower():  # macOS
            base = Path.home() / "Library" / "Application Support"
        else:  # Linux
            base = Path(os.environ.get("XDG_CONFIG_HOME", Path.home() / ".config"))
    else:
        base = Path.home()

    config_dir = base / "persistence-cdga"
    config_dir.mkdir(parents=True, exist_ok=True)
    return config_dir


def load_config(path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Load configuration from file or return defaults.

    Args:
        path: Explicit config file; defaults to config.yaml in get_config_dir()
    """
    config_file = Path(path) if path is not None else get_config_dir() / "config.yaml"

    config = copy.deepcopy(DEFAULT_CONFIG)

    if config_file.exists():
        try:
            with open(config_file, "r", encoding="utf-8") as f:
                user_config = yaml.safe_load(f)

            if user_config:
                if not isinstance(user_config, dict):
                    raise ValueError("top level must be a mapping")
                config = deep_merge(config, user_config)
            logger.info(f"Loaded config from {config_file}")
        except (yaml.YAMLError, ValueError, OSError) as e:
            logger.error(f"Error loading config: {e}")
    elif path is None:
        # Create default config file
        try:
            with open(config_file, "w", encoding="utf-8") as f:
                yaml.dump(DEFAULT_CONFIG, f, default_flow_style=False)
            logger.info(f"Created default config at {config_file}")
        except OSError as e:
            logger.warning(f"Could not create default config: {e}")
    else:
        logger.warning(f"Config file {config_file} not found, using defaults")

    return config


def deep_merge(base: dict, override: dict) -> dict:
    """Deep merge two dictionaries."""
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value
    return result
