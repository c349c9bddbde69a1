"""Three-dimensional census: P-matroids, their extensions, induced orientations.

Run: python demos/three_cube_census.py
"""

import time

from pomcp.cube import all_usos, canonical_codes
from pomcp.pipeline import PipelineConfig, emit_report, run_pipeline
from pomcp.reference import REFERENCE

t0 = time.perf_counter()
rep = run_pipeline(PipelineConfig(3))
print(emit_report(rep, "text"))
print(f"({time.perf_counter() - t0:.1f}s)")

usos = all_usos(3)
print(f"all USOs of the 3-cube: {len(usos)} in {len(set(canonical_codes([u.code for u in usos], 3).tolist()))} classes")
print(f"induced by uniform P-matroid extensions: {rep.orientations_iso} classes (reference {REFERENCE[3]['orientations_iso']})")
print("extensions per CFS class:", rep.extensions_per_class)
print("extensions over C-class representatives:", rep.extensions_over_c_classes)
