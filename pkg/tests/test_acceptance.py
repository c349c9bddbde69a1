"""One test per acceptance criterion; each records a PASS/FAIL line shown in the summary."""

import itertools
import os
import random
import signal
import subprocess
import sys
import time

import pytest

from conftest import record_criterion
from pomcp.chirotope import Chirotope, check_axioms
from pomcp.crosscheck import cross_check, seeded_instances
from pomcp.cube import (
    CubeOrientation,
    all_usos,
    canonical_codes,
    cube_isomorphisms,
    facet_switch,
    iso_canonical_form,
    iso_fs_canonical_form,
    orient_from_extension,
)
from pomcp.extension import ExtensionSignature, enumerate_uniform_extensions, transport_extension
from pomcp.lcp import is_p_matrix, random_matrix, random_p_matrix
from pomcp.pipeline import PipelineConfig, PipelineInterrupted, emit_report, run_pipeline
from pomcp.pmatroid import (
    c_canonical_form,
    c_group,
    cfs_apply,
    cfs_canonical_form,
    cfs_group,
    enumerate_uniform_p_matroids,
    is_p_matroid,
)
from pomcp.reference import REFERENCE, USO_CLASSES

COUNTS = ("c_classes", "cfs_classes", "extensions", "orientations_iso", "acyclic", "orientations_fs")


def _summary(rep, keys):
    ref = REFERENCE[rep.n]
    return ", ".join(f"{k}={getattr(rep, k)}/{ref[k]}" for k in keys)


def test_criterion_1_three_cube_pipeline():
    t0 = time.perf_counter()
    rep = run_pipeline(PipelineConfig(3, workers=1))
    elapsed = time.perf_counter() - t0
    exact = all(getattr(rep, k) == REFERENCE[3][k] for k in COUNTS)
    ok = exact and elapsed < 120
    record_criterion(1, ok, f"3-cube census (got/reference) {_summary(rep, COUNTS)}; {elapsed:.1f}s")
    assert [getattr(rep, k) for k in COUNTS] == [REFERENCE[3][k] for k in COUNTS]
    assert elapsed < 120


def test_criterion_2_uso_census():
    t0 = time.perf_counter()
    usos = all_usos(3)
    classes = {int(c) for c in canonical_codes([o.code for o in usos], 3)}
    elapsed = time.perf_counter() - t0
    ok = len(classes) == USO_CLASSES[3] and elapsed < 5
    record_criterion(2, ok, f"{len(usos)} USOs of the 3-cube in {len(classes)} isomorphism classes; {elapsed:.2f}s")
    assert len(classes) == USO_CLASSES[3]
    assert elapsed < 5


def test_criterion_3_square_oracles():
    t0 = time.perf_counter()
    usos = [c for c in range(16) if _is_uso_brute(CubeOrientation(2, c))]
    bases = [
        Chirotope(2, 4, v) for v in itertools.product((1, -1), repeat=6) if check_axioms(Chirotope(2, 4, v))
    ]
    agree = 0
    for base in bases:
        oracle = sorted(
            c for c in itertools.product((1, -1), repeat=4) if check_axioms(ExtensionSignature(base, c).extended())
        )
        found = sorted(map(tuple, enumerate_uniform_extensions(base).new_values.tolist()))
        agree += found == oracle
    elapsed = time.perf_counter() - t0
    ok = len(usos) == 12 and agree == len(bases) and elapsed < 1
    record_criterion(3, ok, f"{len(usos)} square USOs; extensions match the axiom filter for {agree}/{len(bases)} rank-2 bases; {elapsed:.2f}s")
    assert len(usos) == 12
    assert agree == len(bases)
    assert elapsed < 1


def _is_uso_brute(o):
    # every face has exactly one sink
    n = o.n
    for free in range(1, 2**n):
        for base in range(2**n):
            if base & free:
                continue
            verts = [v for v in range(2**n) if v & ~free == base]
            if sum(1 for v in verts if o.outmap(v) & free == 0) != 1:
                return False
    return True


def test_criterion_4_numeric_agreement():
    t0 = time.perf_counter()
    total = bad = 0
    for strategy, seed in (("diagonal-dominant", 101), ("accept-reject", 202)):
        for k, inst in enumerate(seeded_instances(270, seed, (2, 3, 4), strategy)):
            rule, rseed = ("random", k) if k % 2 else ("least-index", None)
            total += 1
            bad += not cross_check(inst, rule, rseed).ok
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and total >= 500 and elapsed < 120
    record_criterion(4, ok, f"{total - bad}/{total} LCP instances agree (orientation, USO, Holt-Klee, pivot trace); {elapsed:.1f}s")
    assert bad == 0 and total >= 500
    assert elapsed < 120


def test_criterion_5_p_matrix_tests_agree():
    t0 = time.perf_counter()
    agree = p_count = 0
    n_total = 1200
    for s in range(n_total):
        n = 1 + s % 4
        m = random_p_matrix(n, s, "accept-reject") if s % 3 == 0 else random_matrix(n, s)
        a, b = is_p_matrix(m), is_p_matrix(m, method="alternation")
        agree += a == b
        p_count += a
    elapsed = time.perf_counter() - t0
    ok = agree == n_total and 0 < p_count < n_total and elapsed < 60
    record_criterion(5, ok, f"minor and alternation tests agree on {agree}/{n_total} matrices ({p_count} P-matrices); {elapsed:.1f}s")
    assert agree == n_total and 0 < p_count < n_total
    assert elapsed < 60


def test_criterion_6_group_action_invariance():
    t0 = time.perf_counter()
    rng = random.Random(6)
    table = enumerate_uniform_p_matroids(3)
    pms = [c for c in table.c_representatives()]
    group = cfs_group(3)
    failures = 0
    for _ in range(1000):
        chi = rng.choice(pms)
        g = rng.choice(group)
        img = cfs_apply(chi, g)
        failures += not is_p_matroid(img)
        failures += cfs_canonical_form(img) != cfs_canonical_form(chi)
    for _ in range(200):
        chi = rng.choice(pms)
        failures += c_canonical_form(cfs_apply(chi, rng.choice(c_group(3)))) != c_canonical_form(chi)
    # cube level: orbit constancy, involution, closure of the induced orientations
    exts = [e for b in table.representatives for e in enumerate_uniform_extensions(b)]
    induced = {orient_from_extension(e).code for e in exts}
    classes = {iso_canonical_form(CubeOrientation(3, c)) for c in induced}
    isos = cube_isomorphisms(3)
    for _ in range(1000):
        o = CubeOrientation(3, rng.choice(sorted(induced)))
        g = rng.choice(isos)
        i = rng.randrange(1, 4)
        failures += iso_canonical_form(g.apply(o)) != iso_canonical_form(o)
        failures += iso_fs_canonical_form(facet_switch(g.apply(o), i)) != iso_fs_canonical_form(o)
        failures += facet_switch(facet_switch(o, i), i) != o
        failures += iso_canonical_form(facet_switch(o, i)) not in classes
    # the switch is witnessed by reorienting the pair {i, i + n} of the extension
    for e in rng.sample(exts, 100):
        i = rng.randrange(1, 4)
        moved = transport_extension(e, range(1, 7), {i, i + 3})
        failures += orient_from_extension(moved) != facet_switch(orient_from_extension(e), i)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60
    record_criterion(6, ok, f"{failures} invariance failures over CFS actions, canonical forms and facet switches; {elapsed:.1f}s")
    assert failures == 0
    assert elapsed < 60


@pytest.mark.slow
def test_criterion_7_four_cube_stretch(tmp_path):
    t0 = time.perf_counter()
    cfg = PipelineConfig(
        4,
        mode="count-only",
        workers=os.cpu_count() or 1,
        checkpoint_dir=str(tmp_path / "ck4"),
        stop_after="p-matroids",
    )
    rep = run_pipeline(cfg)
    elapsed = time.perf_counter() - t0
    keys = ("c_classes", "cfs_classes")
    ok = all(getattr(rep, k) == REFERENCE[4][k] for k in keys)
    record_criterion(
        7, ok, f"4-cube P-matroid stage (got/reference) {_summary(rep, keys)}; extension stream not run; {elapsed:.0f}s"
    )
    assert [getattr(rep, k) for k in keys] == [REFERENCE[4][k] for k in keys]


def _run_cli(ck, *extra):
    cmd = [sys.executable, "-m", "pomcp", "pipeline", "--n", "3", "--format", "delimited", "--checkpoint-dir", str(ck), *extra]
    return subprocess.run(cmd, capture_output=True, text=True)


def test_criterion_8_resume_and_workers(tmp_path):
    base = emit_report(run_pipeline(PipelineConfig(3)), "delimited")
    identical = []
    # interrupt at every unit boundary, then resume
    ck = tmp_path / "steps"
    steps = 0
    while True:
        try:
            rep = run_pipeline(PipelineConfig(3, checkpoint_dir=str(ck), max_units=1))
            break
        except PipelineInterrupted:
            steps += 1
    identical.append(emit_report(rep, "delimited") == base)
    # a real SIGKILL of a running process, then a resumed run
    ck2 = tmp_path / "killed"
    env = dict(os.environ, PYTHONUNBUFFERED="1")
    proc = subprocess.Popen(
        [sys.executable, "-m", "pomcp", "pipeline", "--n", "3", "--checkpoint-dir", str(ck2)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL, env=env,
    )
    killed = False
    deadline = time.time() + 60
    while time.time() < deadline and proc.poll() is None:
        if (ck2 / "units").exists() and any((ck2 / "units").iterdir()):
            proc.send_signal(signal.SIGKILL)
            killed = True
            break
        time.sleep(0.001)
    proc.wait()
    resumed = _run_cli(ck2)
    identical.append(resumed.stdout == base)
    # worker count
    w1 = emit_report(run_pipeline(PipelineConfig(3, workers=1)), "delimited")
    w8 = emit_report(run_pipeline(PipelineConfig(3, workers=8)), "delimited")
    identical.append(w1 == w8 == base)
    ok = all(identical)
    record_criterion(
        8, ok,
        f"resume after {steps} interruptions, resume after SIGKILL ({'mid-run' if killed else 'after completion'}), "
        f"1 vs 8 workers: reports identical = {identical}",
    )
    assert all(identical)
