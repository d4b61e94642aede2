"""Independent brute-force transcription of the threshold displays.

Each constant is written out as literal expression strings and evaluated by
enumeration; nothing here shares code with :mod:`arks.regimes`.  Used by the
``check`` subcommand and the test-suite.
"""

from __future__ import annotations

_DISPLAYS = {
    "A": [
        ["2*m2-1", "2*m3-1", "(n-2)/n"],
        ["m2-1/n", "m3-1/n", "(n-2)/n"],
        ["2*m2-1", "m3-1/n", "(n-2)/n"],
        ["m2-1/n", "2*m3-1", "(n-2)/n"],
        ["m2-1/n", "m3-1/n"],
    ],
    "B": [
        ["m2-2/n+a", "m3-2/n+g"],
        ["2*m2", "2*m3", "(n-2)/n"],
        ["m2-2/n+a", "2*m3", "(n-2)/n"],
        ["2*m2", "m3-2/n+g", "(n-2)/n"],
    ],
    "C": [
        ["m2+(n*a-2)/(n*a-1)", "m3+(n*g-2)/(n*g-1)"],
        ["2*m2", "2*m3", "(n-2)/n"],
        ["m2+(n*a-2)/(n*a-1)", "2*m3", "(n-2)/n"],
        ["2*m2", "m3+(n*g-2)/(n*g-1)", "(n-2)/n"],
    ],
    "D": [
        ["m2+(n*a-2)/(n*a-1)", "m3+(n*g-2)/(n*g-1)"],
        ["m2+(n*a-2)/(n*a-1)", "2*m3", "(n-2)/n"],
    ],
    "E": [
        ["m2+(n*a-2)/(n*a-1)", "m3+(n*g-2)/(n*g-1)"],
        ["2*m2", "(n-2)/n", "m3+(n*g-2)/(n*g-1)"],
    ],
    "F": [
        ["m2+(n*a-2)/(n*a-1)", "m3+(n*g-2)/(n*g-1)"],
    ],
    "G": [
        ["m2-1/n", "m3-2/n+g"],
        ["2*m2-1", "2*m3", "(n-2)/n"],
        ["m2-1/n", "2*m3", "(n-2)/n"],
        ["2*m2-1", "m3-2/n+g", "(n-2)/n"],
        ["m2-1/n", "m3-2/n+g", "(n-2)/n"],
    ],
    "H": [
        ["m2-1/n", "m3+(n*g-2)/(n*g-1)"],
        ["2*m2-1", "2*m3", "(n-2)/n"],
        ["m2-1/n", "2*m3", "(n-2)/n"],
        ["2*m2-1", "m3+(n*g-2)/(n*g-1)", "(n-2)/n"],
        ["m2-1/n", "m3+(n*g-2)/(n*g-1)", "(n-2)/n"],
    ],
    "I": [
        ["m2-1/n", "m3+(n*g-2)/(n*g-1)"],
        ["2*m2-1", "m3+(n*g-2)/(n*g-1)", "(n-2)/n"],
        ["m2-1/n", "m3+(n*g-2)/(n*g-1)", "(n-2)/n"],
    ],
    "J": [
        ["m2-2/n+a", "m3+(n*g-2)/(n*g-1)"],
        ["2*m2", "2*m3", "(n-2)/n"],
        ["m2-2/n+a", "2*m3", "(n-2)/n"],
        ["2*m2", "m3+(n*g-2)/(n*g-1)", "(n-2)/n"],
    ],
    "K": [
        ["m2-2/n+a", "m3+(n*g-2)/(n*g-1)"],
        ["2*m2", "(n-2)/n", "m3+(n*g-2)/(n*g-1)"],
    ],
    "A'": [
        ["2*m2-1", "2*m3-1", "(n-2)/n"],
        ["m2-1/n", "m3-1/n", "(n-2)/n"],
        ["2*m2-1", "m3-1/n", "(n-2)/n"],
        ["m2-1/n", "2*m3-1", "(n-2)/n"],
        ["2*m2-b", "2*m3-b", "(n-2)/n"],
        ["2*m2-b", "2*m3-b"],
        ["m2-1/n", "2*m3-b", "(n-2)/n"],
        ["2*m2-1", "2*m3-b", "(n-2)/n"],
        ["2*m2-b", "2*m3-1", "(n-2)/n"],
        ["2*m2-b", "m3-1/n", "(n-2)/n"],
    ],
    "B'": [
        ["2*m2", "2*m3", "(n-2)/n"],
        ["2*m2+1-b", "2*m3+1-b"],
        ["2*m2", "2*m3+1-b", "(n-2)/n"],
        ["2*m2+1-b", "2*m3", "(n-2)/n"],
    ],
    "C'": [
        ["2*m2-1", "(n-2)/n", "2*m3"],
        ["2*m2-1", "(n-2)/n", "2*m3+1-b"],
        ["m2-1/n", "2*m3", "(n-2)/n"],
        ["m2-1/n", "(n-2)/n", "2*m3+1-b"],
        ["2*m2-b", "(n-2)/n", "2*m3"],
        ["2*m2-b", "(n-2)/n", "2*m3+1-b"],
        ["2*m2-b", "2*m3+1-b"],
    ],
}

NAMES = tuple(_DISPLAYS)

_COMPILED = {
    name: [[compile(expr, f"<{name}>", "eval") for expr in block] for block in blocks]
    for name, blocks in _DISPLAYS.items()
}


def enumerate_terms(name: str, m2, m3, a, g, b=None, n=3) -> list[list[float]]:
    env = {"__builtins__": {}, "m2": m2, "m3": m3, "a": a, "g": g, "b": b, "n": n}
    return [[eval(code, env) for code in block] for block in _COMPILED[name]]


def brute_force_threshold(name: str, m2, m3, a, g, b=None, n=3) -> float:
    """min over blocks of max over terms, by explicit enumeration."""
    best = None
    for block in enumerate_terms(name, m2, m3, a, g, b, n):
        top = block[0]
        for t in block[1:]:
            if t > top:
                top = t
        if best is None or top < best:
            best = top
    return best
