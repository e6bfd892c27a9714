"""Child map that answers with one extra coordinate per vector."""
import json
import sys

ys = json.loads(sys.argv[1])
for line in sys.stdin:
    values = json.loads(line)["values"]
    first = next(iter(values.values()))
    out = {"values": {y: first + [[0.0, 0.0]] for y in ys}}
    sys.stdout.write(json.dumps(out) + "\n")
    sys.stdout.flush()
