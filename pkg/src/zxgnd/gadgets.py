"""Declarative spider layouts for multi-spider gate translations.

Each gadget lists its spiders and cross edges verbatim so the shapes can
be reviewed at a glance and diffed against their sources.  Spiders are
attached to their operand wire in listing order.  ``x_form`` marks an
X-spider, stored as a Z-spider with Hadamard tags on every leg; cross
edge kinds are given before that color change, which flips the kind once
per ``x_form`` endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class GadgetSpider:
    name: str
    wire: str
    phase: Fraction = Fraction(0)
    grounded: bool = False
    x_form: bool = False


@dataclass(frozen=True)
class GateGadget:
    """Spider/edge layout dropped onto the operand wires of one gate."""

    spiders: tuple[GadgetSpider, ...]
    cross_edges: tuple[tuple[str, str, str], ...]

    def x_form_of(self, name: str) -> bool:
        for spider in self.spiders:
            if spider.name == name:
                return spider.x_form
        raise KeyError(name)


# Classically controlled NOT: dephase the control bit, copy it, and flip
# the target conditioned on the copy.  The standalone channel equals the
# classically controlled X conjugation, which dephases its control.
CTRL_X_GADGET = GateGadget(
    spiders=(
        GadgetSpider("dephase", "control", grounded=True),
        GadgetSpider("copy", "control"),
        GadgetSpider("flip", "target", x_form=True),
    ),
    cross_edges=(("copy", "flip", "p"),),
)

# Classically controlled Z: dephase the control bit, copy it, and apply Z
# to the target conditioned on the copy (a Hadamard cross edge between
# two Z-spiders).
CTRL_Z_GADGET = GateGadget(
    spiders=(
        GadgetSpider("dephase", "control", grounded=True),
        GadgetSpider("copy", "control"),
        GadgetSpider("phase", "target"),
    ),
    cross_edges=(("copy", "phase", "h"),),
)
