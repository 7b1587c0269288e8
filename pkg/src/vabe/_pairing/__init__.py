"""Self-contained BLS12-381 pairing backend (no external crypto deps)."""
