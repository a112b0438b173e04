"""Master-seed splitting.

Per-sample seeds are drawn from a splitmix64 stream started at the master
seed, so sample ``i`` always receives the same seed no matter how work is
scheduled across threads.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state):
    """Return ``(next_state, output)`` of one splitmix64 step."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def derive_seeds(master, count):
    """First ``count`` outputs of the splitmix64 stream seeded by ``master``."""
    state = int(master) & _MASK
    out = []
    for _ in range(count):
        state, z = splitmix64(state)
        out.append(z)
    return out
