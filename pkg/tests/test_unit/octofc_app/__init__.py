"""Unit tests for octofc_app package."""
