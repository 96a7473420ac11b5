"""Learned incentive planners for two-action repeated matrix games."""

__version__ = "0.1.0"
