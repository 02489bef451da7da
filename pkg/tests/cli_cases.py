"""One fixture-backed invocation per CLI subcommand with its expected exit code."""

from pathlib import Path

F = Path(__file__).resolve().parent.parent / "fixtures"


def f(name):
    return str(F / name)


CASES = [
    ("validate", ["validate", "--input", f("bz2.cub")], 0),
    ("validate_map", ["validate", "--input", f("circle_to_point.map")], 0),
    ("kan", ["kan", "--input", f("two_points.cub"), "--max-dim", "3"], 0),
    ("kan_refuted", ["kan", "--input", f("circle.cub"), "--max-dim", "2"], 1),
    ("contractible", ["contractible", "--input", f("point.cub"), "--max-dim", "3"], 0),
    ("fibration", ["fibration", "--input", f("collapse.map"), "--max-dim", "2"], 0),
    ("pi0", ["pi0", "--input", f("two_points.cub")], 0),
    ("pi", ["pi", "--input", f("bz2.cub"), "--n", "1"], 0),
    ("homology", ["homology", "--input", f("boundary_square.cub")], 0),
    ("product", ["product", "--input", f("boundary_square.cub"), "--input", f("boundary_square.cub")], 0),
    ("specseq", ["specseq", "--couple", f("filtered_random.json"), "--pages", "4"], 0),
    ("specseq_s3", ["specseq", "--couple", f("s3_couple.json")], 0),
    ("curvature", ["curvature", "--family", f("flat.met"), "--samples", "10"], 0),
    ("rescale", ["rescale", "--family", f("generic_t.met"), "--samples", "10"], 0),
    ("suspension", ["suspension", "--family", f("sphere_family.met"), "--samples", "20"], 0),
    ("pregauge", ["pregauge", "--input", f("pregauge_pair.json")], 0),
    ("pregauge_random", ["pregauge", "--samples", "20", "--n", "3", "--seed", "5"], 0),
    ("angle", ["angle", "--kappa", "0.5", "--polar-radius", "2", "--samples", "40"], 0),
    ("dice", ["dice", "--n", "2", "--samples", "2000", "--seed", "3"], 0),
    ("flow", ["flow", "--n", "2", "--samples", "6", "--seed", "1"], 0),
]
