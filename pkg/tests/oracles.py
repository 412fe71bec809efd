"""Independent reference computations used by the tests.

Nothing here imports the package's counting or scoring code.
"""

from mpmath import mp, mpf

LETTERS = set("abcdefghijklmnopqrstuvwxyz'")


def tally(symbols, stride_ms, active_only=False):
    """Single pass character tally: (duration, words, alphabets, active, inactive, separators)."""
    words = active = inactive = seps = 0
    run_len = run_active = 0
    for ch in symbols + " ":
        if ch == " ":
            if run_len and (run_active or not active_only):
                words += 1
            run_len = run_active = 0
            seps += 1
            continue
        run_len += 1
        if ch == "-":
            inactive += 1
        elif ch in LETTERS:
            active += 1
            run_active += 1
        else:
            raise ValueError(ch)
    seps -= 1  # the sentinel
    return len(symbols) * stride_ms / 1000, words, len(symbols), active, inactive, seps


def read_score(f1, f2, f3, l1=1, l2=1, l3=1, t1=6, t2=10, t3=1.75, dps=50):
    """Three-sigmoid score evaluated in arbitrary precision."""
    with mp.workdps(dps):
        s = lambda z: 1 / (1 + mp.exp(-z))
        f1, f2, f3 = mpf(str(f1)), mpf(str(f2)), mpf(str(f3))
        return float(
            s(l1 * (f1 - mpf(str(t1))))
            + s(-l2 * (f2 - mpf(str(t2))))
            + s(l3 * (f3 - mpf(str(t3))))
        )
