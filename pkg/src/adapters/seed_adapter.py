import hashlib


def derive_seed(master: int, *parts) -> int:
    """Stable 32-bit seed for a unit of work identified by `parts`.

    Depends only on (master, parts), never on scheduling order.
    """
    key = "|".join([str(int(master))] + [str(part) for part in parts])
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:4], "little")
