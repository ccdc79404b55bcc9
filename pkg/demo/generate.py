"""Regenerates the committed demo assets (deterministic; run from repo root).

Assets:
  poly_2d.json      -- f = x1*x2 + 5*x1, the two-feature worked example
  samples_2d.csv    -- a few instances for explain/diagnose demos
  background_2d.csv -- single zero row (doubles as expansion baseline)
  mlp_d8.json       -- fixed 8-feature tanh MLP used by the evaluation demos
  background_d8.csv -- 128 reference rows
  samples_d8.csv    -- 100 instances with a binary `target` column
  external_sum.py   -- toy external oracle speaking the line protocol
"""

import json
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent


def fmt(v: float) -> str:
    return f"{v:.6f}"


def write_csv(path: Path, names, rows) -> None:
    lines = [",".join(names)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def make_poly_2d() -> None:
    doc = {
        "type": "polynomial",
        "input_dim": 2,
        "monomials": [
            {"coef": 1.0, "exps": {"0": 1, "1": 1}},
            {"coef": 5.0, "exps": {"0": 1}},
        ],
    }
    (HERE / "poly_2d.json").write_text(json.dumps(doc, indent=2) + "\n")
    write_csv(HERE / "samples_2d.csv", ["x1", "x2"], [[2, 3], [1, 1], [0.5, -2]])
    write_csv(HERE / "background_2d.csv", ["x1", "x2"], [[0, 0]])


def make_mlp_d8() -> None:
    rng = np.random.default_rng(20240811)
    d, hidden = 8, 16
    w1 = np.round(rng.normal(0.0, 1.0 / np.sqrt(d), (hidden, d)), 6)
    b1 = np.round(rng.normal(0.0, 0.1, hidden), 6)
    w2 = np.round(rng.normal(0.0, 1.0 / np.sqrt(hidden), (1, hidden)), 6)
    b2 = np.round(rng.normal(0.0, 0.1, 1), 6)
    doc = {
        "type": "mlp",
        "input_dim": d,
        "layers": [
            {"weights": w1.tolist(), "bias": b1.tolist(), "activation": "tanh"},
            {"weights": w2.tolist(), "bias": b2.tolist(), "activation": "identity"},
        ],
        "final_transform": "none",
    }
    (HERE / "mlp_d8.json").write_text(json.dumps(doc, indent=2) + "\n")

    names = [f"f{i}" for i in range(d)]
    bg = np.round(rng.normal(0.0, 1.0, (128, d)), 6)
    write_csv(HERE / "background_d8.csv", names, bg)

    X = np.round(rng.normal(0.0, 1.0, (100, d)), 6)
    h = np.tanh(X @ w1.T + b1)
    y = (h @ w2.T + b2)[:, 0]
    labels = (y > np.median(y)).astype(float)
    write_csv(
        HERE / "samples_d8.csv", names + ["target"], np.column_stack([X, labels])
    )


EXTERNAL = '''\
#!/usr/bin/env python3
"""Toy external oracle: f(x) = sum(x) + 0.5 * x[0] * x[-1]."""
import json
import sys

for line in sys.stdin:
    req = json.loads(line)
    outs = [sum(row) + 0.5 * row[0] * row[-1] for row in req["inputs"]]
    sys.stdout.write(json.dumps({"id": req["id"], "outputs": outs}) + "\\n")
    sys.stdout.flush()
'''


def main() -> None:
    make_poly_2d()
    make_mlp_d8()
    (HERE / "external_sum.py").write_text(EXTERNAL, encoding="utf-8")
    print("demo assets written to", HERE)


if __name__ == "__main__":
    main()
