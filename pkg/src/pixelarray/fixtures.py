"""Built-in example systems, stored in the system-file format."""
from __future__ import annotations

from .solver import SystemSpec
from .sysfile import parse_system

CIRCLE = """\
# two parabolas sharing w; eliminating w leaves x^2 + y^2 = 1
relation M1: w - x^2 = 0
relation M2: w - (1 - y^2) = 0
var w, x, y in [-1.2, 1.2) res 50
expose x, y
tol * 0.05
"""

BUTTERFLY = """\
relation E1: cos(ln(z^2 + 10^-3*x)) - x + 10^-5*z^-1 = 0
relation E2: cosh(w + 10^-3*y) + y + 10^-4*w = 2
relation E3: tan(x + y)*(x - 2)^-1*(x + 3)^-1*y^-2 = 1
var w, x, y, z in [-3, 3) res 125
expose w, z
"""

THREEEQ = """\
relation T1: tan(y + w) + exp(x) = 2
relation T2: x^3 + cos(ln(y^2)) = 1.5*v
relation T3: w + z + 10^-1*v = 0.5
var v, x, z in [-3, 3) res 75
var w, y in [-2.5, 2.5) res 75
expose w, y
"""

EXEMPLAR = """\
relation R1: x^2 + 3*abs(x - y) - 5 = 0
relation R2: y^2*v^3 - w^5 <= 0
relation R3: cos(u + z*x) - w^2 = 0
var u, v, x, y in [-2, 2) res 50
var w, z in [-1, 1) res 80
expose v, z
"""

DEMOS = {"circle": CIRCLE, "butterfly": BUTTERFLY, "threeeq": THREEEQ}


def load(name: str) -> SystemSpec:
    texts = dict(DEMOS, exemplar=EXEMPLAR)
    return parse_system(texts[name])
