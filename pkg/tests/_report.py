"""Shared registry for acceptance verdict lines.

The acceptance tests append one line per criterion; the terminal-summary
hook in conftest.py prints them after the run, outside output capture.
"""

lines: list[str] = []
