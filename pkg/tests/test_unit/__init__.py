"""Unit tests package.

One module per source module, grouped by package. Everything runs in
process on small operators.
"""
