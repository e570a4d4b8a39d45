"""Coherent-state quantization of constrained systems via projection operators."""
