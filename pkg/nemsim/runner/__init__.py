"""Runner - experiment registry, config files, worker pool and CSV output."""
