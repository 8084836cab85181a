"""Smoke test for the `lozenge` extension module.

Builds the extension with cargo (unless LOZENGE_SO points at a built
library), copies it next to a temporary import path and exercises the
main entry points.
"""

import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_library() -> Path:
    prebuilt = os.environ.get("LOZENGE_SO")
    if prebuilt:
        return Path(prebuilt)
    subprocess.run(
        ["cargo", "build", "--release", "-p", "lozenge-py"],
        cwd=ROOT,
        check=True,
    )
    target = ROOT / "target" / "release"
    for name in ("liblozenge.so", "liblozenge.dylib", "lozenge.dll"):
        if (target / name).exists():
            return target / name
    sys.exit(f"no built library found in {target}")


def main() -> None:
    lib = locate_library()
    workdir = Path(tempfile.mkdtemp(prefix="lozenge-py-"))
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy(lib, workdir / f"lozenge{suffix}")
    sys.path.insert(0, str(workdir))

    import lozenge

    h = lozenge.hexagon(1, 1, 1)
    assert len(h) == 6 and h.up_count == h.down_count == 3
    assert h.count_tilings() == 2 == lozenge.macmahon(1, 1, 1)
    assert len(h.tilings(10)) == 2

    big = lozenge.hexagon(3, 3, 3)
    assert lozenge.count_tilings(big) == lozenge.macmahon(3, 3, 3) == 980

    p = lozenge.staircase(3, 6, 4)
    assert p.count_tilings() == lozenge.proctor(3, 6, 4) == 182182

    r = lozenge.quartered(2, 6, 3, [2, 3])
    assert r.count_tilings() == lozenge.formula_quartered(2, 6, 3, [2, 3])
    num, den = lozenge.formula_ratio_form(2, 6, 3, [2, 3])
    assert den == 1 and num == lozenge.formula_quartered(2, 6, 3, [2, 3])
    assert lozenge.quartered(2, 5, 3, [2]).count_tilings() == lozenge.formula_quartered(2, 5, 3, [2])
    assert lozenge.quartered(0, 5, 2, [1, 2]).count_tilings() == 1

    reduced, placed = r.remove_forced()
    assert reduced.count_tilings() == r.count_tilings() and placed >= 0
    again = lozenge.Region.from_text(r.to_text())
    assert again.cells == r.cells and again.label == r.label

    holds, counts = lozenge.recurrence_check(1, 2, 1, [1])
    assert holds and counts[0] * counts[1] == counts[2] * counts[3] + counts[4] * counts[5]
    holds, _ = lozenge.kuo_check(2, 6, 3, [1, 3])
    assert holds
    assert lozenge.identity_check(1, 3, 2)
    assert lozenge.ratio_lemma_check([1, 2, 5, 6], 4)

    try:
        lozenge.quartered(2, 5, 3, [9])
    except ValueError:
        pass
    else:
        raise AssertionError("invalid dents accepted")

    assert r.to_svg(0).startswith("<svg")
    summary = lozenge.run_sweep("desk")
    assert summary["passed"], summary["failures"]

    probe = lozenge.correspondence_probe(2, 4, 3)
    assert all(label is not None and same for *_, label, same in probe)

    print(f"lozenge smoke test passed ({sum(t[0] for t in summary['checks'].values())} sweep instances)")


if __name__ == "__main__":
    main()
