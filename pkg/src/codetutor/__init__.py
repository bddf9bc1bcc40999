"""codetutor: guardrailed programming-help service with query-log analytics."""

__version__ = "0.1.0"
