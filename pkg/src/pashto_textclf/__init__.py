"""Text classification workbench for Pashto documents."""

__version__ = "0.1.0"
