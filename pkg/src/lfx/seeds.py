"""Named seed derivation: all randomness flows from one root seed."""

import hashlib


def derive_seed(root_seed: int, *names) -> int:
    """Stable 64-bit seed for a named random stream (split, init, synth, ...)."""
    key = ":".join([str(root_seed), *map(str, names)])
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "little")
