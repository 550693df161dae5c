"""Unit tests for octofc_core package."""
