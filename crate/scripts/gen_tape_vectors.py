#!/usr/bin/env python3
"""Reference implementation of the tape symbol function.

Writes tape_vectors.json, the golden file the Rust tests compare against.
Kept deliberately separate from the Rust code so the two can be checked
against each other.
"""
import json
import sys

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
SALT = 0xD1B54A32D192ED03


def mix64(z):
    z &= MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK
    z ^= z >> 31
    return z


def symbol(seed, part, t, b):
    limit = ((1 << 64) // b) * b
    base = (seed + ((part << 32) + t + 1) * GAMMA) & MASK
    j = 0
    while True:
        v = mix64(base + j * SALT)
        if v < limit:
            return v % b
        j += 1


def main(out):
    records = []
    for seed in (0, 1, 42, 0xDEADBEEF, MASK):
        for b in (1, 2, 3, 5, 6, 7, 256):
            for part in (0, 1, 2, 17, (1 << 32) - 1):
                for t in (0, 1, 2, 3, 1000, (1 << 32) - 1):
                    records.append(
                        {"seed": seed, "part": part, "t": t, "b": b,
                         "symbol": symbol(seed, part, t, b)}
                    )
    with open(out, "w") as fh:
        json.dump(records, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tape_vectors.json")
