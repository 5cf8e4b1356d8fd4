"""Hybrid quantum-classical circuit optimization via ZX diagrams with discard."""

from .circuit import Gate, HybridCircuit, WireType

__all__ = ["Gate", "HybridCircuit", "WireType"]

__version__ = "0.1.0"
