"""List decoding of Tanner and AEL expander codes via agreement CSPs and weak regularity."""

__version__ = "0.1.0"
