"""Built-in experiment configurations.

Each figure of the benchmark set has a `paper-<figure>` preset with the
full published parameters and a `desk-<figure>` preset sized to finish on
a laptop (shorter final time or a trimmed eps range).  Presets are plain
config texts, so `--preset name` and a config file behave identically.
"""
from __future__ import annotations

from .mgt import ConfigError

_FIG1_DRIFT = """\
# Drifting spiral: reference vs the order-0/1/2 slow models.
problem = LinearDrift
method = HMM
eps = 0.05
T = 25
dt = 1e-2
dt_coupled = 1e-3

[experiment]
k = 0
[experiment]
k = 1
[experiment]
k = 2
"""

_FIG2_CHUA_COST = """\
# Cost vs error stratification on the cubic oscillator.
problem = CubicChua
eps = 0.02
T = 10
dt = 0.02
dt_coupled = 1e-3
P = 5
m = 3
checkpoints = 2, 4, 6, 8, 10

[experiment]
method = HMM
k = 0
[experiment]
method = TwoGrid
k = 0
L = 1
[experiment]
method = HMM
k = 1
[experiment]
method = TwoGrid
k = 1
L = 1
[experiment]
method = HMM
k = 2
"""

_FIG3_ROTATION = """\
# Long-time rotation sweep: one corrected level on base orders 0..2,
# integrated to T = 1/eps.
problem = LinearRotation
method = MGT
L = 1
P = 4
m = 3
dt = 1e-2
dt_coupled = 1e-3
T = 1/eps
eps = 2^-4, 2^-5, 2^-6, 2^-7

[experiment]
k = 0
[experiment]
k = 1
[experiment]
k = 2
"""

_FIG4_LORENZ_PAPER = """\
# Two-scale lattice sweep, published horizon.
problem = Lorenz96
method = MGT
k = 0
P = 4
m = 3
dt = 1e-3
dt_coupled = 1e-4
T = 100
eps = 2^-4, 2^-5, 2^-6, 2^-7

[experiment]
L = 1
[experiment]
L = 2
"""

_FIG4_LORENZ_DESK = """\
# Two-scale lattice sweep, shortened horizon and trimmed eps range.
problem = Lorenz96
method = MGT
k = 0
P = 4
m = 3
dt = 1e-3
dt_coupled = 1e-4
T = 20
eps = 2^-4, 2^-5, 2^-6

[experiment]
L = 1
[experiment]
L = 2
"""

_FIG5_ROBERTSON_PAPER = """\
# Kinetics sweep, published horizon.
problem = Robertson
method = MGT
L = 1
P = 4
m = 3
dt = 1e-3
dt_coupled = 1e-4
T = 500
eps = 2^-5, 2^-6, 2^-7, 2^-8

[experiment]
k = 0
[experiment]
k = 1
"""

_FIG5_ROBERTSON_DESK = _FIG5_ROBERTSON_PAPER.replace("T = 500", "T = 50").replace(
    "published horizon", "desk horizon"
)

_FIG6_ENZYME = """\
# Enzyme sweep: corrected schemes and both correction strategies.
problem = Enzyme
P = 4
m = 3
dt = 1e-3
dt_coupled = 1e-4
T = 20
eps = 2^-5, 2^-6, 2^-7, 2^-8
method = MGT

[experiment]
k = 0
L = 1
[experiment]
k = 0
L = 1
strategy = Manifold
[experiment]
k = 1
L = 1
[experiment]
k = 0
L = 2
"""

PRESETS: dict[str, str] = {
    "paper-fig1": _FIG1_DRIFT,
    "desk-fig1": _FIG1_DRIFT,
    "paper-fig2": _FIG2_CHUA_COST,
    "desk-fig2": _FIG2_CHUA_COST,
    "paper-fig3": _FIG3_ROTATION,
    "desk-fig3": _FIG3_ROTATION,
    "paper-fig4": _FIG4_LORENZ_PAPER,
    "desk-fig4": _FIG4_LORENZ_DESK,
    "paper-fig5": _FIG5_ROBERTSON_PAPER,
    "desk-fig5": _FIG5_ROBERTSON_DESK,
    "paper-fig6": _FIG6_ENZYME,
    "desk-fig6": _FIG6_ENZYME,
}


def load_preset(name: str) -> str:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r} (known: {known})")
    return PRESETS[name]
