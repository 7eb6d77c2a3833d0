"""CLI invocations with frozen outputs in tests/golden.

Regenerate after an intended output change with

    python3 tests/golden_cases.py

and review the diff before committing.
"""
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"

# (golden stem, argv relative to the repo root, expected exit code)
CASES = [
    ("certify_rot", ["quotient", "certify", "data/p25.topo", "data/rot.act"], 0),
    ("certify_swap", ["quotient", "certify", "data/p9.topo", "data/swap.act"], 1),
    ("build_swap", ["quotient", "build", "data/p9.topo", "data/swap.act"], 0),
    ("verify_refl", ["quotient", "verify", "data/p25.topo", "data/refl.act", "--probes", "2"], 1),
    ("lambda_line3", ["lambda", "build", "data/line3.topo", "--element", "{l,m,r}:{m}"], 0),
    ("lambda_verify_line3", ["lambda", "verify", "data/line3.topo", "--element", "{l,m,r}:{m}"], 0),
    ("canopy_verify_line3", ["canopy", "verify", "data/line3_cover.canopy"], 0),
    ("canopy_affinize_rot", ["canopy", "affinize", "data/rot.canopy"], 0),
    ("morphism_ident_colfold", ["morphism", "equal", "data/ident.map", "data/colfold.map", "data/rot.act"], 1),
    ("diffuse_center", ["check", "diffuse", "data/center.map"], 1),
    ("diffuse_noncont", ["check", "diffuse", "data/noncont.map"], 1),
    ("pullback_general_rot", ["pullback", "general", "data/rot_b.map", "--c", "b", "--b", "b",
                              "--ramified", "{(2,2)}"], 0),
    ("probe_catalog_3", ["probe", "catalog", "3"], 0),
    ("schwarz_report", ["schwarz", "report", "--csv", "-"], 0),
]


def regenerate():
    import os

    from gentop.cli import run
    GOLDEN.mkdir(exist_ok=True)
    os.chdir(ROOT)
    for stem, argv, want in CASES:
        code, text, _ = run(argv)
        if code != want:
            raise SystemExit(f"{stem}: exit {code}, expected {want}")
        (GOLDEN / f"{stem}.txt").write_text(text, encoding="utf-8", newline="")
        print(f"{stem}: {len(text.splitlines())} lines")


if __name__ == "__main__":
    regenerate()
