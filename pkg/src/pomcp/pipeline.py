"""End-to-end census: P-matroids, reorientation cover, extensions, orientation classes.

Work is cut into units (search prefixes for the P-matroid stage, reorientation
representative plus extension prefix for the extension stage).  Each finished
unit is written atomically to the checkpoint directory, so an interrupted run
resumes where it stopped; results are merged in unit-id order, so neither the
worker count nor the resume point can change a count.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import multiprocessing
import os
import random
import time
from dataclasses import asdict, dataclass, field
from math import comb
from pathlib import Path
from typing import Callable

import numpy as np

from .chirotope import Chirotope, Symmetry
from .cube import CubeOrientation, OrientationClassTable, is_uso, orient_from_extension, orientation_codes
from .database import parse_database
from .errors import ArgumentError, CheckpointError, ParseError, PomcpError
from .extension import ExtensionSignature, enumerate_uniform_extensions, extension_prefixes, extension_subtree, transport_values
from .pmatroid import (
    SUPPORTED_ORDERS,
    CoverEntry,
    PMatroidClassTable,
    Recovery,
    SearchPart,
    assemble_table,
    database_part,
    reorientation_class_cover,
    search_prefixes,
    search_subtree,
)
from .reference import LABELS, REFERENCE
from .signs import format_signs, parse_signs

log = logging.getLogger(__name__)

CHECKPOINT_ENV = "POMCP_CHECKPOINT_DIR"
COUNT_KEYS = ("c_classes", "cfs_classes", "extensions", "orientations_iso", "acyclic", "orientations_fs")
# prefix depths used to cut the two searches into work units
PM_SPLIT = {2: 0, 3: 2, 4: 8}
EXT_SPLIT = {2: 0, 3: 2, 4: 6}


class PipelineInterrupted(PomcpError):
    """Raised when a run stops early on request (``max_units``)."""


@dataclass(frozen=True)
class PipelineConfig:
    n: int
    source: str = "backtracking"
    database: str | None = None
    workers: int = 1
    checkpoint_dir: str | None = None
    mode: str = "full"
    seed: int = 0
    max_units: int | None = None  # stop after this many newly computed units
    stop_after: str | None = None  # "p-matroids" ends the run after class enumeration

    def __post_init__(self):
        if self.n not in SUPPORTED_ORDERS:
            raise ArgumentError(f"unsupported n={self.n}; expected one of {SUPPORTED_ORDERS}")
        if self.workers < 1:
            raise ArgumentError("worker count must be at least 1")
        if self.mode not in ("full", "count-only"):
            raise ArgumentError(f"unknown mode {self.mode!r}")
        if self.source not in ("backtracking", "database"):
            raise ArgumentError(f"unknown source {self.source!r}")
        if self.stop_after not in (None, "p-matroids"):
            raise ArgumentError(f"unknown stage {self.stop_after!r}")
        if self.source == "database" and not self.database:
            raise ArgumentError("database source needs a file")

    def fingerprint(self) -> dict:
        fp = {"n": self.n, "source": self.source, "mode": self.mode, "seed": self.seed}
        if self.database:
            fp["database_sha256"] = hashlib.sha256(Path(self.database).read_bytes()).hexdigest()
        fp["split"] = [PM_SPLIT[self.n], EXT_SPLIT[self.n]]
        return fp


@dataclass
class RunReport:
    n: int
    source: str
    mode: str
    c_classes: int = 0
    cfs_classes: int = 0
    extensions: int = 0
    orientations_iso: int = 0
    acyclic: int = 0
    orientations_fs: int = 0
    labeled_p_matroids: int = 0
    reorientation_classes: int = 0
    raw_orientations: int = 0
    all_uso: bool = True
    all_holt_klee: bool = True
    spot_checks: int = 0
    extensions_per_class: list[int] = field(default_factory=list)
    extensions_over_c_classes: int | None = None  # informational, small n only
    units_total: int = 0
    units_resumed: int = 0
    timings: dict[str, float] = field(default_factory=dict)
    complete: bool = True  # False when the run stopped after the P-matroid stage
    fs_class_keys: list[str] = field(default_factory=list)

    def realizability(self, verdicts: dict[str, str] | None = None) -> dict[str, str]:
        """Verdict per facet-switch class; ``unknown`` unless supplied externally."""
        verdicts = verdicts or {}
        return {k: verdicts.get(k, "unknown") for k in self.fs_class_keys}

    @property
    def verified(self) -> bool:
        """Internal checks: every class is a USO with the Holt-Klee property."""
        return self.all_uso and self.all_holt_klee

    def comparisons(self) -> list[tuple[str, int, int | None]]:
        ref = REFERENCE.get(self.n, {})
        keys = COUNT_KEYS if self.complete else COUNT_KEYS[:2]
        return [(k, getattr(self, k), ref.get(k)) for k in keys]

    def matches_reference(self) -> bool:
        return all(ref is None or ref == val for _, val, ref in self.comparisons())


# -- unit workers ----------------------------------------------------------------


def _pack_values(arr: np.ndarray) -> list[str]:
    return [format_signs(row.tolist()) for row in arr]


def _unpack_values(rows: list[str], width: int) -> np.ndarray:
    return np.array([parse_signs(r) for r in rows], dtype=np.int8).reshape(-1, width)


def _part_to_json(part: SearchPart) -> dict:
    return {
        "labeled": part.labeled,
        "cfs": _pack_values(part.cfs_values),
        "cfs_stab": part.cfs_stab.tolist(),
        "c": _pack_values(part.c_values),
        "c_stab": part.c_stab.tolist(),
    }


def _part_from_json(d: dict, width: int) -> SearchPart:
    return SearchPart(
        d["labeled"],
        _unpack_values(d["cfs"], width),
        np.array(d["cfs_stab"], dtype=np.int64),
        _unpack_values(d["c"], width),
        np.array(d["c_stab"], dtype=np.int64),
    )


def _run_pm_unit(args) -> dict:
    n, prefix = args
    return _part_to_json(search_subtree(n, prefix))


def _run_db_unit(args) -> dict:
    n, text = args
    return _part_to_json(database_part(Chirotope.from_string(text)))


def _run_ext_unit(args) -> dict:
    n, theta_text, members, prefix, mode = args
    theta = Chirotope.from_string(theta_text)
    leaves = extension_subtree(theta, prefix)
    per_class = {}
    codes_all = []
    witnesses = {}
    for k, pi_text, perm, flips, sign in members:
        pi = Chirotope.from_string(pi_text)
        moved = transport_values(leaves, n, 2 * n, Symmetry(tuple(perm), frozenset(flips)), sign)
        codes = orientation_codes(pi.values, moved, n)
        per_class[str(k)] = len(codes)
        uniq, first = np.unique(codes, return_index=True)
        codes_all.append(uniq)
        if mode == "full":
            for c, j in zip(uniq.tolist(), first.tolist()):
                text = str(ExtensionSignature(pi, tuple(moved[j].tolist())))
                if c not in witnesses or text < witnesses[c]:
                    witnesses[c] = text
    merged = np.unique(np.concatenate(codes_all)) if codes_all else np.zeros(0, np.uint64)
    return {
        "extensions": int(len(leaves)) * len(members),
        "per_class": per_class,
        "codes": base64.b64encode(merged.astype("<u8").tobytes()).decode(),
        "witnesses": {str(c): w for c, w in sorted(witnesses.items())},
    }


def _decode_codes(text: str) -> np.ndarray:
    return np.frombuffer(base64.b64decode(text), dtype="<u8").astype(np.uint64)


# -- checkpoints -------------------------------------------------------------------


class Checkpoint:
    """Directory of per-unit JSON files, each written via temp file + rename."""

    def __init__(self, root: str | None, fingerprint: dict):
        self.root = Path(root) if root else None
        if self.root is None:
            return
        (self.root / "units").mkdir(parents=True, exist_ok=True)
        cfg = self.root / "config.json"
        if cfg.exists():
            stored = self._load_json(cfg)
            if stored != fingerprint:
                raise CheckpointError(f"checkpoint at {self.root} was written for a different configuration")
        else:
            self._atomic_write(cfg, fingerprint)

    @staticmethod
    def _load_json(path: Path):
        raw = path.read_bytes()
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CheckpointError(f"corrupt checkpoint file {path}: {exc.msg}", offset=exc.pos) from None
        except UnicodeDecodeError as exc:
            raise CheckpointError(f"corrupt checkpoint file {path}: not UTF-8", offset=exc.start) from None

    @staticmethod
    def _atomic_write(path: Path, obj) -> None:
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w") as fh:
            json.dump(obj, fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    def _path(self, unit_id: str) -> Path:
        return self.root / "units" / (unit_id.replace(":", "_").replace("/", "_") + ".json")

    def get(self, unit_id: str):
        if self.root is None:
            return None
        p = self._path(unit_id)
        if not p.exists():
            return None
        d = self._load_json(p)
        if not isinstance(d, dict) or d.get("id") != unit_id or "result" not in d:
            raise CheckpointError(f"checkpoint file {p} does not hold unit {unit_id}", offset=0)
        return d["result"]

    def put(self, unit_id: str, result) -> None:
        if self.root is not None:
            self._atomic_write(self._path(unit_id), {"id": unit_id, "result": result})


def _run_units(units: list[tuple[str, Callable, tuple]], cfg: PipelineConfig, ckpt: Checkpoint, budget: list):
    """Run the units not found in the checkpoint; returns ``{id: result}`` and the resumed count."""
    results, todo = {}, []
    for uid, fn, args in units:
        got = ckpt.get(uid)
        if got is None:
            todo.append((uid, fn, args))
        else:
            results[uid] = got
    resumed = len(results)
    if budget[0] is not None:
        todo_now = todo[: max(budget[0], 0)]
    else:
        todo_now = todo

    def record(uid, res):
        results[uid] = res
        ckpt.put(uid, res)
        if budget[0] is not None:
            budget[0] -= 1

    if cfg.workers > 1 and len(todo_now) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(cfg.workers) as pool:
            jobs = [(uid, pool.apply_async(fn, (args,))) for uid, fn, args in todo_now]
            for uid, job in jobs:
                record(uid, job.get())
    else:
        for uid, fn, args in todo_now:
            record(uid, fn(args))
    if len(todo_now) < len(todo):
        raise PipelineInterrupted(
            f"unit budget of {cfg.max_units} used up; {len(todo) - len(todo_now)} units of this stage remain"
        )
    return results, resumed


# -- the pipeline -----------------------------------------------------------------


def _prefix_id(prefix) -> str:
    return format_signs(prefix) if prefix else "root"


def p_matroid_stage(cfg: PipelineConfig, ckpt: Checkpoint, budget: list) -> tuple[PMatroidClassTable, int, int]:
    n = cfg.n
    width = comb(2 * n, n)
    if cfg.source == "database":
        records = parse_database(cfg.database)
        units = []
        for k, rec in enumerate(records):
            chi = rec.chirotope()
            if (chi.r, chi.n) != (n, 2 * n):
                raise ParseError(f"database record {rec.label} is not in OM({n},{2 * n})")
            units.append((f"pm:db:{k:06d}", _run_db_unit, (n, str(chi))))
    else:
        units = [(f"pm:{_prefix_id(p)}", _run_pm_unit, (n, p)) for p in search_prefixes(n, PM_SPLIT[n])]
    results, resumed = _run_units(units, cfg, ckpt, budget)
    parts = [_part_from_json(results[uid], width) for uid, _, _ in units]
    table = assemble_table(n, parts, cfg.source)
    if cfg.source == "backtracking" and table.labeled_count != sum(p.labeled for p in parts):
        raise AssertionError("C-orbit sizes do not add up to the number of search leaves")
    return table, len(units), resumed


def _cover_stage(table: PMatroidClassTable, ckpt: Checkpoint) -> list[CoverEntry]:
    got = ckpt.get("cover")
    if got is not None:
        return [
            CoverEntry(
                Chirotope.from_string(e["theta"]),
                [(m[0], Recovery(Symmetry(tuple(m[1]), frozenset(m[2])), m[3])) for m in e["members"]],
            )
            for e in got
        ]
    cover = reorientation_class_cover(table)
    ckpt.put(
        "cover",
        [
            {
                "theta": str(e.theta),
                "members": [[k, list(r.symmetry.perm), sorted(r.symmetry.flips), r.sign] for k, r in e.members],
            }
            for e in cover
        ],
    )
    return cover


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    n = cfg.n
    if cfg.checkpoint_dir is None and os.environ.get(CHECKPOINT_ENV):
        cfg = PipelineConfig(**{**asdict(cfg), "checkpoint_dir": os.environ[CHECKPOINT_ENV]})
    ckpt = Checkpoint(cfg.checkpoint_dir, cfg.fingerprint())
    budget = [cfg.max_units]
    report = RunReport(n, cfg.source, cfg.mode)

    t0 = time.perf_counter()
    table, n_units, resumed = p_matroid_stage(cfg, ckpt, budget)
    report.timings["p_matroids"] = time.perf_counter() - t0
    report.c_classes, report.cfs_classes = table.c_count, table.cfs_count
    report.labeled_p_matroids = table.labeled_count
    log.info("P-matroids: %d labeled, %d C-classes, %d CFS-classes", table.labeled_count, table.c_count, table.cfs_count)

    report.units_total, report.units_resumed = n_units, resumed
    if cfg.stop_after == "p-matroids":
        report.complete = False
        return report

    t0 = time.perf_counter()
    cover = _cover_stage(table, ckpt)
    report.timings["cover"] = time.perf_counter() - t0
    report.reorientation_classes = len(cover)

    t0 = time.perf_counter()
    units = []
    for t, entry in enumerate(cover):
        members = [
            (k, str(table.representatives[k]), list(r.symmetry.perm), sorted(r.symmetry.flips), r.sign)
            for k, r in entry.members
        ]
        for p in extension_prefixes(entry.theta, EXT_SPLIT[n]):
            units.append((f"ext:{t:06d}:{_prefix_id(p)}", _run_ext_unit, (n, str(entry.theta), members, p, cfg.mode)))
    results, resumed2 = _run_units(units, cfg, ckpt, budget)
    report.units_total = n_units + len(units)
    report.units_resumed = resumed + resumed2

    per_class = [0] * table.cfs_count
    witnesses: dict[int, str] = {}
    code_sets = []
    for uid, _, _ in units:
        res = results[uid]
        report.extensions += res["extensions"]
        for k, c in res["per_class"].items():
            per_class[int(k)] += c
        code_sets.append(_decode_codes(res["codes"]))
        for c, w in res["witnesses"].items():
            c = int(c)
            if c not in witnesses or w < witnesses[c]:
                witnesses[c] = w
    report.extensions_per_class = per_class
    if n <= 3:
        report.extensions_over_c_classes = sum(len(enumerate_uniform_extensions(c)) for c in table.c_representatives())
    codes = np.unique(np.concatenate(code_sets)) if code_sets else np.zeros(0, np.uint64)
    report.raw_orientations = len(codes)
    report.timings["extensions"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    classes = OrientationClassTable(n)
    classes.add_codes({int(c): witnesses.get(int(c), "") for c in codes})
    report.orientations_iso = classes.iso_count
    report.acyclic = classes.acyclic_count
    report.orientations_fs = classes.fs_count
    report.fs_class_keys = [str(CubeOrientation(n, key)) for key in sorted(classes.iso_fs)]
    report.all_uso = all(is_uso(CubeOrientation(n, key)) for key in classes.iso)
    report.all_holt_klee = all(c.holt_klee for c in classes.iso.values())
    if cfg.mode == "full":
        report.spot_checks = _spot_check(witnesses, cfg.seed)
    report.timings["orientations"] = time.perf_counter() - t0
    if cfg.checkpoint_dir:
        classes.save(Path(cfg.checkpoint_dir) / "orientation_classes.tsv")
        table.save(Path(cfg.checkpoint_dir) / "p_matroid_classes.tsv")
        write_verdicts(Path(cfg.checkpoint_dir) / "realizability.txt", report.realizability())
    return report


def _spot_check(witnesses: dict[int, str], seed: int, k: int = 200) -> int:
    """Recompute a seeded sample of witness orientations through the scalar path."""
    rng = random.Random(seed)
    keys = sorted(witnesses)
    sample = keys if len(keys) <= k else rng.sample(keys, k)
    for code in sample:
        if orient_from_extension(ExtensionSignature.from_string(witnesses[code])).code != code:
            raise AssertionError(f"batch and scalar orientation disagree for witness {witnesses[code]}")
    return len(sample)


# -- reports ------------------------------------------------------------------------


def emit_report(r: RunReport, fmt: str = "text", timings: bool = False) -> str:
    """Render a report; output depends only on the report (timings are opt-in)."""
    if fmt == "delimited":
        lines = [f"n\t{r.n}", f"source\t{r.source}", f"mode\t{r.mode}"]
        for key, val, ref in r.comparisons():
            status = "n/a" if ref is None else ("PASS" if ref == val else "FAIL")
            lines.append(f"{key}\t{val}\t{'' if ref is None else ref}\t{status}")
        lines.append(f"labeled_p_matroids\t{r.labeled_p_matroids}")
        if not r.complete:
            lines.append("stages\tp-matroids only")
            return "\n".join(lines) + "\n"
        for key in ("reorientation_classes", "raw_orientations", "spot_checks"):
            lines.append(f"{key}\t{getattr(r, key)}")
        lines.append(f"all_uso\t{int(r.all_uso)}")
        lines.append(f"all_holt_klee\t{int(r.all_holt_klee)}")
        lines.append("extensions_per_class\t" + ",".join(map(str, r.extensions_per_class)))
        if r.extensions_over_c_classes is not None:
            lines.append(f"extensions_over_c_classes\t{r.extensions_over_c_classes}")
        lines.append("realizability\tnot checked (out of scope)")
        if timings:
            lines += [f"time_{k}\t{v:.3f}" for k, v in sorted(r.timings.items())]
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ArgumentError(f"unknown report format {fmt!r}")
    w = max(len(v) for v in LABELS.values())
    out = [f"{r.n}-cube census (source: {r.source}, mode: {r.mode})", ""]
    out.append(f"{'quantity'.ljust(w)}  {'value':>13}  {'reference':>13}  check")
    for key, val, ref in r.comparisons():
        status = "-" if ref is None else ("PASS" if ref == val else "FAIL")
        out.append(f"{LABELS[key].ljust(w)}  {val:>13,}  {'-' if ref is None else format(ref, ','):>13}  {status}")
    out.append("")
    out.append(f"labeled uniform P-matroids (up to sign): {r.labeled_p_matroids:,}")
    if not r.complete:
        out.append("extension and orientation stages not run")
        if timings:
            out += [f"time {k}: {v:.2f} s" for k, v in sorted(r.timings.items())]
        return "\n".join(out) + "\n"
    out.append(f"reorientation classes covering them: {r.reorientation_classes:,}")
    out.append(f"distinct labeled orientations: {r.raw_orientations:,}")
    out.append(f"every class a unique sink orientation: {'yes' if r.all_uso else 'NO'}")
    out.append(f"every class Holt-Klee: {'yes' if r.all_holt_klee else 'NO'}")
    out.append("extensions per CFS class: " + " ".join(map(str, r.extensions_per_class)))
    if r.extensions_over_c_classes is not None:
        out.append(f"extensions summed over C-class representatives (informational): {r.extensions_over_c_classes:,}")
    out.append("realizability: not checked (out of scope)")
    if r.units_resumed:
        out.append(f"resumed {r.units_resumed} of {r.units_total} work units from checkpoint")
    if timings:
        out.append("")
        out += [f"time {k}: {v:.2f} s" for k, v in sorted(r.timings.items())]
    return "\n".join(out) + "\n"


def parse_report(text: str) -> dict:
    """Read a delimited report back into ``{key: value}`` (counts as ints)."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split("\t")
        if len(parts) < 2:
            raise ParseError("expected tab-separated fields", line=lineno)
        key, val = parts[0], parts[1]
        if key in COUNT_KEYS or key in ("n", "labeled_p_matroids", "reorientation_classes", "raw_orientations",
                                         "spot_checks", "all_uso", "all_holt_klee", "extensions_over_c_classes"):
            out[key] = int(val)
        elif key == "extensions_per_class":
            out[key] = [int(x) for x in val.split(",") if x]
        else:
            out[key] = val
    return out


def verify_counts(counts: dict, n: int) -> list[tuple[str, int, int, bool]]:
    """Compare parsed counts against the embedded reference values for ``n``."""
    ref = REFERENCE.get(n)
    if ref is None:
        raise ArgumentError(f"no reference values for n={n}")
    return [(k, counts.get(k), ref[k], counts.get(k) == ref[k]) for k in COUNT_KEYS if k in counts]


def write_verdicts(path, verdicts: dict[str, str]) -> None:
    lines = ["# facet-switch class representative, realizability verdict"]
    lines += [f"{k} {v}" for k, v in verdicts.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_verdicts(path) -> dict[str, str]:
    """External realizability verdicts: ``<orientation key> <yes|no|unknown>`` per line."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rsplit(None, 1)
        if len(parts) != 2 or parts[1] not in ("yes", "no", "unknown"):
            raise ParseError("expected '<key> yes|no|unknown'", line=lineno)
        out[parts[0].strip()] = parts[1]
    return out
