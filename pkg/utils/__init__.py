"""
Utility functions and helpers for COPQ bench.
This package contains logging setup and the shared error hierarchy.
"""
