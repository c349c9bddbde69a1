"""Published census values used for comparison in reports.

Keys match :class:`pomcp.pipeline.RunReport` count fields.
"""

REFERENCE = {
    3: {
        "c_classes": 19,
        "cfs_classes": 13,
        "extensions": 1920,
        "orientations_iso": 17,
        "acyclic": 16,
        "orientations_fs": 8,
    },
    4: {
        "c_classes": 156_691,
        "cfs_classes": 19_076,
        "extensions": 1_334_887_042,
        "orientations_iso": 6_910,
        "acyclic": 5_951,
        "orientations_fs": 589,
    },
}

# isomorphism classes of all unique sink orientations, by dimension
USO_CLASSES = {3: 19, 4: 14_614}

LABELS = {
    "c_classes": "P-matroids up to C-equivalence",
    "cfs_classes": "P-matroids up to CFS-equivalence",
    "extensions": "P-matroid extensions",
    "orientations_iso": "orientations up to isomorphism",
    "acyclic": "acyclic orientations up to isomorphism",
    "orientations_fs": "orientations up to isomorphism and facet switches",
}
