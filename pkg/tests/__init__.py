"""Test suite for octofc.

This module contains all test files and test utilities for validating the
octonion algebra, para-linear operators, spectra and functional calculus.
"""

__author__ = "Ben Ellis <ben.ellis@opencorporates.com>"
