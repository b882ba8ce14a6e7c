#
#  Copyright 2026 The tankds Authors
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#       https://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.
"""Convert the LASA handwriting dataset (.mat files) into a tankds corpus.

Each <Name>.mat becomes <out>/<Name>/ with corpus.json and one CSV per
demonstration (t,x1,x2,v1,v2). The multi-model motions are skipped unless
--include-multi is given.

    python3 tools/lasa_to_corpus.py path/to/LASAHandwritingDataset/DataSet out/lasa
"""

import argparse
import json
import pathlib
import sys

import numpy as np
import scipy.io


def convert(mat_path: pathlib.Path, out_dir: pathlib.Path, max_demos: int) -> int:
    data = scipy.io.loadmat(mat_path, simplify_cells=True)
    demos = data["demos"]
    if isinstance(demos, dict):
        demos = [demos]
    demos = demos[:max_demos] if max_demos > 0 else demos
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, demo in enumerate(demos, start=1):
        pos = np.asarray(demo["pos"], dtype=float)
        vel = np.asarray(demo["vel"], dtype=float)
        t = np.asarray(demo["t"], dtype=float).reshape(-1)
        table = np.column_stack([t, pos.T, vel.T])
        name = f"demo_{i}.csv"
        np.savetxt(out_dir / name, table, delimiter=",", header="t,x1,x2,v1,v2",
                   comments="", fmt="%.17g")
        files.append(name)
    manifest = {"name": mat_path.stem, "dim": 2, "goal": [0.0, 0.0], "files": files}
    (out_dir / "corpus.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return len(files)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("dataset", type=pathlib.Path, help="directory holding the LASA .mat files")
    parser.add_argument("out", type=pathlib.Path, help="corpus root to create")
    parser.add_argument("--include-multi", action="store_true", help="keep Multi_Models_* motions")
    parser.add_argument("--max-demos", type=int, default=0, help="demonstrations kept per motion (0: all)")
    args = parser.parse_args()

    mats = sorted(args.dataset.glob("*.mat"))
    if not args.include_multi:
        mats = [m for m in mats if not m.stem.startswith("Multi_Models")]
    if not mats:
        print(f"no .mat files under {args.dataset}", file=sys.stderr)
        return 1
    for mat in mats:
        n = convert(mat, args.out / mat.stem, args.max_demos)
        print(f"{mat.stem}: {n} demonstrations")
    return 0


if __name__ == "__main__":
    sys.exit(main())
