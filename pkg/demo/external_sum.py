#!/usr/bin/env python3
"""Toy external oracle: f(x) = sum(x) + 0.5 * x[0] * x[-1]."""
import json
import sys

for line in sys.stdin:
    req = json.loads(line)
    outs = [sum(row) + 0.5 * row[0] * row[-1] for row in req["inputs"]]
    sys.stdout.write(json.dumps({"id": req["id"], "outputs": outs}) + "\n")
    sys.stdout.flush()
