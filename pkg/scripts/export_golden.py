"""Regenerate the committed golden documents and reports under ``golden/``.

    python3 scripts/export_golden.py [--out golden]

Each example is written as a dilation document (``exN.json``) plus the
report that ``dilation-lab verify`` produces for it (``reports/exN.json``).
The collision model of example 3 is written in both interaction variants.
"""
from __future__ import annotations

import argparse
import os

from dilation_lab.config import Options
from dilation_lab.documents import collision_document, dilation_document, pipeline_json, write_json_atomic
from dilation_lab.operators import number
from dilation_lab.pipeline import certify
from dilation_lab.scenarios import BUILDERS, build_example, ex3_collision_spec


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "golden"))
    args = ap.parse_args()
    os.makedirs(os.path.join(args.out, "reports"), exist_ok=True)
    opts = Options()
    for key in BUILDERS:
        s = build_example(key)
        doc = dilation_document(s.dilation, s.sys_rep, s.env_rep, opts, s.name)
        write_json_atomic(os.path.join(args.out, f"ex{key}.json"), doc)
        res = certify(s.dilation, s.sys_rep, s.env_rep, opts)
        report = {"name": s.name, "passed": res.passed, **pipeline_json(res)}
        write_json_atomic(os.path.join(args.out, "reports", f"ex{key}.json"), report)
        print(f"ex{key}: {'pass' if res.passed else 'fail'} ({len(res.certificates)} certificates)")
    for primed, stem in ((False, "ex3_collision"), (True, "ex3_prime_collision")):
        spec = ex3_collision_spec(0.1, 1.0, primed=primed)
        write_json_atomic(os.path.join(args.out, f"{stem}.json"),
                          collision_document(spec, t=1.0, j_s=number(4), name=stem))
        print(f"{stem}: written")


if __name__ == "__main__":
    main()
