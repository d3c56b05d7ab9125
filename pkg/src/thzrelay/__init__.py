"""Performance analysis toolkit for dual-hop amplify-and-forward THz relay links."""

__version__ = "0.1.0"
