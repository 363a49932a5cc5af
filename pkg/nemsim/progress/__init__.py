"""Progress - run and sweep-point events for long simulations."""
