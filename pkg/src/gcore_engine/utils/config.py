"""Configuration manager for the G-CORE engine"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

CONFIG_FILE = ".gcore-config.yaml"

DEFAULTS: Dict[str, Any] = {
    "catalog": {"directory": ".gcore-catalog", "default_graph": None},
    "settings": {
        "seed": 0,
        "log_level": "WARNING",
        "memoize_views": False,
        "k_shortest_cap": None,
    },
}

# Environment variables override the YAML file
ENVIRONMENT = {
    "GCORE_CATALOG": "catalog.directory",
    "GCORE_DEFAULT_GRAPH": "catalog.default_graph",
    "GCORE_SEED": "settings.seed",
    "GCORE_LOG_LEVEL": "settings.log_level",
}


def _lookup(config: Dict[str, Any], key: str) -> Any:
    value: Any = config
    for k in key.split("."):
        if isinstance(value, dict) and k in value:
            value = value[k]
        else:
            return None
    return value


class ConfigManager:
    """Manages project configuration"""

    def __init__(self, config_file: str = CONFIG_FILE, use_env: bool = True):
        self.config_file = config_file
        self.use_env = use_env
        if use_env:
            load_dotenv()
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file"""
        if os.path.exists(self.config_file):
            try:
                with open(self.config_file, "r") as f:
                    return yaml.safe_load(f) or {}
            except (OSError, yaml.YAMLError) as e:
                logger.warning(f"Could not load config file: {e}")
                return {}
        return {}

    def _save_config(self) -> None:
        """Save configuration to file"""
        with open(self.config_file, "w") as f:
            yaml.dump(self.config, f, default_flow_style=False)

    def init_project(self, project_name: str) -> None:
        """Initialize a new project configuration"""
        self.config = {
            "project": {
                "name": project_name,
                "version": "1.0.0",
                "created_at": str(Path().cwd()),
            },
            "catalog": dict(DEFAULTS["catalog"]),
            "settings": dict(DEFAULTS["settings"]),
        }
        self._save_config()

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value: environment, then file, then built-in default"""
        if self.use_env:
            for variable, mapped in ENVIRONMENT.items():
                if mapped == key and os.environ.get(variable):
                    return os.environ[variable]
        value = _lookup(self.config, key)
        if value is not None:
            return value
        fallback = _lookup(DEFAULTS, key)
        return fallback if fallback is not None else default

    def set(self, key: str, value: Any) -> None:
        """Set a dotted key, creating intermediate sections, and save"""
        *sections, leaf = key.split(".")
        section = self.config
        for name in sections:
            section = section.setdefault(name, {})
        section[leaf] = value
        self._save_config()

    def get_project_name(self) -> Optional[str]:
        return self.get("project.name")

    def catalog_directory(self) -> str:
        return str(self.get("catalog.directory"))

    def seed(self) -> int:
        try:
            return int(self.get("settings.seed", 0))
        except (TypeError, ValueError):
            logger.warning(f"Ignoring non-integer seed {self.get('settings.seed')!r}")
            return 0

    def k_shortest_cap(self) -> Optional[int]:
        cap = self.get("settings.k_shortest_cap")
        return int(cap) if cap is not None else None

    def memoize_views(self) -> bool:
        value = self.get("settings.memoize_views", False)
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes")
        return bool(value)
