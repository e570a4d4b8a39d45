"""Worked constrained systems with closed-form oracles."""
