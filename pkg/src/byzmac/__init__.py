"""Adversary identification over two-user multiple-access channels."""

from .mac_core import AvMac, Kernel, Mac, builtin_channel, validate_avmac, validate_mac

__version__ = "0.1.0"

__all__ = ["AvMac", "Kernel", "Mac", "builtin_channel", "validate_avmac", "validate_mac", "__version__"]
