"""Exact spider phases as rational multiples of pi.

A phase is a :class:`fractions.Fraction` in units of pi, kept in ``[0, 2)``.
Exact rationals avoid the float-comparison pitfalls that Pauli and Clifford
phase tests would otherwise hit.
"""

from __future__ import annotations

from fractions import Fraction
from math import pi
from typing import Union

PhaseLike = Union[Fraction, int, str]


def normalize_phase(value: PhaseLike) -> Fraction:
    """Return ``value`` (in units of pi) reduced modulo 2."""
    return Fraction(value) % 2


def phase_to_float(phase: Fraction) -> float:
    """Return the angle in radians."""
    return float(phase) * pi


def is_pauli(phase: Fraction) -> bool:
    """True for phases 0 and pi."""
    return phase % 1 == 0


def is_proper_clifford(phase: Fraction) -> bool:
    """True for phases pi/2 and 3pi/2."""
    return phase % 1 == Fraction(1, 2)


def is_clifford(phase: Fraction) -> bool:
    """True for multiples of pi/2."""
    return (phase * 2) % 1 == 0


def format_phase(phase: Fraction) -> str:
    """Render a phase the way the circuit text format spells it.

    >>> format_phase(Fraction(1, 2))
    '1/2'
    >>> format_phase(Fraction(1))
    '1'
    """
    if phase.denominator == 1:
        return str(phase.numerator)
    return f"{phase.numerator}/{phase.denominator}"


def parse_phase(text: str) -> Fraction:
    """Parse ``num`` or ``num/den`` (units of pi) and reduce modulo 2."""
    try:
        return normalize_phase(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad phase literal: {text!r}") from exc
