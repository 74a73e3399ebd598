"""Two-spinor kinematics, Wigner rotations and EPR correlations for massive and massless particles."""

__version__ = "0.1.0"
