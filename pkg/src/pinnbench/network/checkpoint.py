"""Plain-text checkpoints.

Layout::

    # pinnbench-checkpoint v1
    # spec {"kind": "mlp", ...}
    # registry weights.0:2x100,weights.1:100x100,...
    # count 40801
    0.123...
    ...

Values are written with ``repr`` so they round-trip bit-exactly.
"""

from __future__ import annotations

import json

import torch

from pinnbench import DTYPE
from pinnbench.errors import ContractError

MAGIC = "# pinnbench-checkpoint v1"


def _registry(module):
    return ",".join(f"{n}:{'x'.join(map(str, p.shape))}" for n, p in module.named_parameters())


def save_checkpoint(path, module, spec: dict):
    lines = [MAGIC, "# spec " + json.dumps(spec, sort_keys=True), "# registry " + _registry(module)]
    values = torch.cat([p.detach().reshape(-1) for p in module.parameters()]).tolist()
    lines.append(f"# count {len(values)}")
    lines.extend(repr(float(v)) for v in values)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_header(path):
    header = {}
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != MAGIC:
            raise ContractError(f"{path} is not a checkpoint file")
        for line in fh:
            if not line.startswith("# "):
                break
            key, _, rest = line[2:].rstrip("\n").partition(" ")
            header[key] = rest
    header["spec"] = json.loads(header.get("spec", "{}"))
    return header


def load_checkpoint(path, module):
    header = read_header(path)
    if header.get("registry") != _registry(module):
        raise ContractError("checkpoint registry does not match the module")
    with open(path, encoding="utf-8") as fh:
        values = [float(line) for line in fh if line.strip() and not line.startswith("#")]
    if len(values) != int(header["count"]):
        raise ContractError("checkpoint value count mismatch")
    flat = torch.tensor(values, dtype=DTYPE)
    i = 0
    with torch.no_grad():
        for p in module.parameters():
            p.copy_(flat[i : i + p.numel()].view_as(p))
            i += p.numel()
    return header["spec"]
