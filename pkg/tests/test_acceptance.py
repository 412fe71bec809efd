"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""

import json
import subprocess
import sys
import time
from pathlib import Path


from readspont.alphabet import Label
from readspont.corpus import Confusion
from readspont.features import MeasuredFeatures, derive
from readspont.scoring import DEFAULT_PARAMS, classify, score

from oracles import read_score

HERE = Path(__file__).parent

# (measured a..e, printed derived awl, aps, wps, inactive_aps, active_awl)
TABLE = {
    "spontaneous": ((47.62, 69, 2382, 1915, 364), (34.52, 50.02, 1.45, 7.63, 27.75)),
    "read": ((29.67, 72, 1484, 951, 413), (20.61, 50.02, 2.43, 13.92, 13.21)),
}
DERIVED_FIELDS = ("awl", "aps", "wps", "inactive_aps", "active_awl")


def test_table_derived_features(acceptance_line):
    t0 = time.perf_counter()
    worst = 0.0
    for measured, printed in TABLE.values():
        d = derive(MeasuredFeatures(*measured))
        for name, value in zip(DERIVED_FIELDS, printed):
            worst = max(worst, abs(getattr(d, name) - value))
    elapsed = time.perf_counter() - t0
    ok = worst <= 0.02 and elapsed < 0.1
    acceptance_line("derived-feature reproduction (10 ratios, tol 0.02)", ok, f"max abs err {worst:.4f}")
    assert ok


def test_score_separation(acceptance_line):
    errs, labels = [], []
    for name, (_, printed) in TABLE.items():
        _, _, wps, inactive_aps, active_awl = printed
        r = score(active_awl, inactive_aps, wps, DEFAULT_PARAMS)
        errs.append(abs(r - read_score(active_awl, inactive_aps, wps)))
        d = derive(MeasuredFeatures(*TABLE[name][0]))
        labels.append(classify(d).label.value)
    r_spont = score(27.75, 7.63, 1.45)
    r_read = score(13.21, 13.92, 2.43)
    ok = (
        max(errs) <= 0.005
        and abs(r_spont - 2.340) <= 0.005
        and abs(r_read - 1.683) <= 0.005
        and labels == ["spontaneous", "read"]
    )
    acceptance_line("score separation at tau_r=1.75", ok,
                    f"R_spont={r_spont:.4f} R_read={r_read:.4f} labels={labels}")
    assert ok


def test_confusion_arithmetic(acceptance_line):
    c = Confusion.from_counts(read_read=88, spont_read=8, read_spont=16, spont_spont=90)
    band = Confusion.from_counts(read_read=8, spont_read=4, read_spont=3, spont_spont=8)
    got = (
        f"{100 * c.accuracy:.2f}",
        f"{100 * c.recall(Label.READ):.2f}",
        f"{100 * c.recall(Label.SPONTANEOUS):.2f}",
    )
    ok = got == ("88.12", "84.62", "91.84") and band.n_correct == 16 and band.total == 23 \
        and f"{100 * band.accuracy:.1f}" == "69.6"
    acceptance_line("confusion arithmetic", ok,
                    f"acc/recalls={got} borderline={band.n_correct}/{band.total}")
    assert ok


def test_synthetic_corpus_end_to_end(tmp_path, acceptance_line):
    corpus, out = tmp_path / "corpus", tmp_path / "out"
    run = lambda *argv: subprocess.run([sys.executable, "-m", "readspont", *argv],
                                       capture_output=True, text=True)
    t0 = time.perf_counter()
    synth = run("synth", "-o", str(corpus), "--n-read", "50", "--n-spont", "50", "--jitter", "0.1", "--seed", "1")
    ev = run("evaluate", str(corpus / "manifest.csv"), "-o", str(out))
    elapsed = time.perf_counter() - t0
    assert synth.returncode == 0, synth.stderr
    assert ev.returncode == 0, ev.stderr
    report = json.loads((out / "report.json").read_text())
    acc = report["confusion"]["accuracy"]
    ok = report["n_segments"] == 100 and acc >= 0.95 and elapsed < 10 and f"accuracy={acc:.4f}" in ev.stdout
    acceptance_line("synthetic corpus via CLI (100 streams, >=95%, <10 s)", ok,
                    f"accuracy={acc:.4f} elapsed={elapsed:.2f}s")
    assert ok


def test_property_suites(acceptance_line):
    t0 = time.perf_counter()
    res = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(HERE / "test_properties.py")],
        capture_output=True, text=True, cwd=HERE.parent,
    )
    elapsed = time.perf_counter() - t0
    summary = res.stdout.strip().splitlines()[-1] if res.stdout.strip() else res.stderr[-200:]
    ok = res.returncode == 0 and elapsed < 60
    acceptance_line("property suites (<60 s)", ok, f"{summary} in {elapsed:.1f}s")
    assert ok, res.stdout[-3000:]
