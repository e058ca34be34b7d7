#!/usr/bin/env python3
"""Regenerate the golden files under tests/golden/ from the current code.

Run from the repository root:  python3 scripts/regen_goldens.py
"""

import json
from pathlib import Path

from pexpfan import catalog
from pexpfan.fan import resolve
from pexpfan.ktheory import chi, dual_basis_solve, gram_matrix
from pexpfan.laurent import poly_to_json
from pexpfan.pexp import pexp_to_json

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def dump(name: str, obj) -> None:
    path = GOLDEN / name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    print(f"wrote {path}")


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    fan = catalog.weighted_p112()
    res = resolve(fan)
    spans = catalog.p112_spanning_classes(fan)
    cones = catalog.p112_duality_cones(fan)

    gram = gram_matrix(fan, spans, cones, resolution=res)
    dump("p112_gram.json", gram.to_json())

    value = chi(fan, catalog.p112_demo_class(fan), resolution=res)
    dump("p112_chi_demo_class.json", poly_to_json(value))

    duals = dual_basis_solve(fan, cones, spans, resolution=res)
    dump("p112_dual_basis.json", [pexp_to_json(g) for g in duals])


if __name__ == "__main__":
    main()
