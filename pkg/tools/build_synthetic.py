"""Generate a ~3,000-line synthetic contract and its compact AST (gzip) for the timing test.

    SOLCJS=/path/to/node_modules/solc python3 tools/build_synthetic.py
"""

from __future__ import annotations

import gzip
import json
import random
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "tests" / "data"
TARGET_LINES = 3000

FUNCTION = """\
    function op{k}(address to, uint amount, uint[] memory items) public returns (uint) {{
        uint total{k} = balances[msg.sender] + amount * {a};
        require(total{k} >= amount, "overflow in op{k}");
        if (amount > {b}) {{
            balances[msg.sender] -= amount;
            balances[to] += amount;
            emit Moved(msg.sender, to, amount);
        }} else {{
            pending[to] = pending[to] + amount / {c};
        }}
        for (uint i = 0; i < items.length; i++) {{
            total{k} += items[i] % {a};
            counter++;
        }}
        while (total{k} > {d}) {{
            total{k} = total{k} / 2;
        }}
        lastHash = keccak256(abi.encodePacked(to, amount, block.timestamp));
        owner = msg.sender;
        delete pending[msg.sender];
        return total{k};
    }}
"""

MODIFIER = """\
    modifier guard{k}() {{
        require(msg.sender == owner, "not owner");
        _;
        counter = counter + {a};
    }}
"""


def build(seed: int = 7) -> str:
    rng = random.Random(seed)
    head = ("// SPDX-License-Identifier: MIT\npragma solidity ^0.8.0;\n\ncontract Synthetic {\n"
            "    mapping(address => uint) balances;\n    mapping(address => uint) pending;\n"
            "    address owner;\n    uint counter;\n    bytes32 lastHash;\n"
            "    event Moved(address from, address to, uint amount);\n\n")
    parts = [head]
    lines = head.count("\n")
    k = 0
    while lines < TARGET_LINES - 2:
        nums = dict(k=k, a=rng.randint(2, 9), b=rng.randint(10, 999), c=rng.randint(2, 9),
                    d=rng.randint(1000, 99999))
        chunk = (MODIFIER if k % 5 == 4 else FUNCTION).format(**nums) + "\n"
        parts.append(chunk)
        lines += chunk.count("\n")
        k += 1
    parts.append("}\n")
    return "".join(parts)


def main() -> int:
    source = build()
    batch = [{"name": "Synthetic", "source": source}]
    proc = subprocess.run(["node", str(ROOT / "tools" / "solc_batch.js")],
                          input=json.dumps(batch), capture_output=True, text=True, check=True)
    res = json.loads(proc.stdout)[0]
    if res["errors"]:
        print("\n".join(res["errors"]), file=sys.stderr)
        return 1
    (DATA / "synthetic3000.sol").write_text(source, encoding="utf-8")
    with gzip.open(DATA / "synthetic3000.ast.json.gz", "wt", encoding="utf-8") as fh:
        json.dump(res["ast"], fh, separators=(",", ":"))
    print(f"{source.count(chr(10))} lines")
    return 0


if __name__ == "__main__":
    sys.exit(main())
