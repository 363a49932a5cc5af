"""NEMSim - Pulse-level simulator of an electromechanical quantum processor."""

__version__ = "0.1.0"
