"""Physics - operator algebra, Hamiltonians, master equations, pulses and gate compilation."""
