"""
Initial data sources for the --init flag.
"""
