"""Weighted Muntz-type completeness tests on the half-line."""
