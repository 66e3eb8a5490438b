import hashlib


def digest(*parts) -> str:
    """Short stable hash of a structural description.

    Bytes are hashed verbatim; everything else through ``repr``.
    """
    h = hashlib.blake2b(digest_size=12)
    for part in parts:
        if isinstance(part, (bytes, bytearray, memoryview)):
            h.update(b"B")
            h.update(bytes(part))
        else:
            h.update(b"R")
            h.update(repr(part).encode())
        h.update(b"|")
    return h.hexdigest()
