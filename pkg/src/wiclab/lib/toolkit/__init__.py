from .get_env import get_config_val, get_env

__all__ = (
    "get_config_val",
    "get_env",
)
