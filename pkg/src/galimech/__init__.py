"""Frame-independent particle mechanics on flat Newtonian space-time.

Layered as:

* ``galilean_core``      -- chart conventions, metric, frame-change covector
* ``frame_dynamics``     -- per-frame lagrangians/hamiltonians, boosts, RK4
* ``generating_objects`` -- function families, critical sets, Morse ranks
* ``affine_phase``       -- frame-independent classes, universal dynamics
* ``harness``            -- scenario configs, invariant checks, CLI
"""

__version__ = "0.1.0"
