"""Command line entry point and the verification suites it runs."""

from .main import build_parser, main

__all__ = [
    "build_parser",
    "main",
]
