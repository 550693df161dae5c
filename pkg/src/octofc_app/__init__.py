"""octofc Application Package.

This package contains the command-line entry point and per-command configuration.
"""
