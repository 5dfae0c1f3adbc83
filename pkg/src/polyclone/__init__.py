"""polyclone: multilingual syntactic code-clone detector and benchmark harness."""

__version__ = "0.1.0"
