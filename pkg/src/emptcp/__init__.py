"""Energy model and energy-aware path management for MPTCP on WiFi + LTE."""

__version__ = "0.1.0"
