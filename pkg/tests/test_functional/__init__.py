"""Functional tests package.

These tests run the ``octofc`` CLI in a subprocess and check its artifacts
and exit codes.
"""
