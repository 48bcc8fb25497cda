"""Physical constants (CODATA 2018, SI units)."""

E_CHARGE = 1.602176634e-19  # elementary charge, C
HBAR = 1.054571817e-34      # reduced Planck constant, J*s
