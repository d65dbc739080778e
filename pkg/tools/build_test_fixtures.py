"""Rebuild tests/data/fixtures.json: small contracts with their compiler ASTs.

Needs node and solc-js 0.8.x:  SOLCJS=/path/to/node_modules/solc python3 tools/build_test_fixtures.py

The tests never run the compiler; they read the ASTs frozen here.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "tests" / "data" / "fixtures.json"

HEADER = "// SPDX-License-Identifier: MIT\npragma solidity ^0.8.0;\n\n"

CONTRACTS = {
    "empty": "contract Empty {}\n",
    "return_zero": """contract R {
    function f() public pure returns (uint) {
        return 0;
    }
}
""",
    "while_loop": """contract W {
    function f(uint x) public pure returns (uint) {
        while (x > 0) {
            x = x - 1;
        }
        return x;
    }
}
""",
    "declarations": """contract D {
    bool flag;
    address owner;
    uint[] values;

    function f() public pure {
        uint count = 0;
        uint total;
    }
}
""",
    "modifiers": """contract M {
    address owner;

    modifier onlyOwner() {
        require(msg.sender == owner);
        _;
    }

    modifier noop() {
        _;
    }
}
""",
    "if_else": """contract I {
    uint x;
    uint y;
    uint z;

    function f(uint a, uint b) public {
        if (a > b) {
            x = a;
        } else {
            x = b;
        }
        if (a == 0) {
            x = 1;
            y = 2;
            z = 3;
        }
    }
}
""",
    "specials": """contract S {
    uint public last;
    address public miner;

    function f() public {
        last = block.gaslimit;
        miner = block.coinbase;
        last = gasleft();
        last = addmod(last, 2, 7);
        assert(last < 7);
    }

    function g(bytes memory data) public pure returns (bytes20) {
        return ripemd160(data);
    }
}
""",
    "calls": """contract C {
    uint total;

    function add(uint v) internal returns (uint) {
        total += v;
        return total;
    }

    function f() public {
        add(1);
        total = add(2) + 3;
    }
}
""",
    "unsupported": """contract U {
    event Ping(uint value);
    enum State { Open, Closed }

    function f(address a) public {
        try this.g(a) returns (uint v) {
            emit Ping(v);
        } catch {
            revert();
        }
    }

    function g(address a) external pure returns (uint) {
        return uint160(a);
    }
}
""",
}


def main() -> int:
    batch = [{"name": name, "source": HEADER + body} for name, body in CONTRACTS.items()]
    proc = subprocess.run(["node", str(ROOT / "tools" / "solc_batch.js")],
                          input=json.dumps(batch), capture_output=True, text=True, check=True)
    out = {}
    for item, c in zip(batch, json.loads(proc.stdout)):
        if c["errors"] or c["ast"] is None:
            print(f"{item['name']}: compile failed:\n" + "\n".join(c["errors"]), file=sys.stderr)
            return 1
        out[item["name"]] = {"source": item["source"], "ast": c["ast"]}
    OUT.write_text(json.dumps(out, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(out)} fixtures to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
