"""
Configuration package: environment defaults, run configuration and constant tables.
"""
