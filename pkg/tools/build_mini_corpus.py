"""Rebuild src/solnl/data/mini_corpus.jsonl from the snippet list below.

Needs node and solc-js 0.8.x:  SOLCJS=/path/to/node_modules/solc python3 tools/build_mini_corpus.py

References were written by hand from the code alone.  The first five rows are
the table of qualitative examples with their human reference sentences.
Each snippet is wrapped in a minimal contract; the embedded AST is that
contract's compact AST and gas is solc's estimate for the enclosing function
(null when solc reports it as unbounded or the snippet is not inside one).
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "src" / "solnl" / "data" / "mini_corpus.jsonl"

HEADER = "// SPDX-License-Identifier: MIT\npragma solidity ^0.8.0;\n\n"

# (name, snippet, reference, state declarations, function header or None)
SNIPPETS = [
    ("declare_amount",
     "uint amount = deposits[msg.sender];",
     "Set variable amount as user's deposits.",
     "mapping(address => uint) deposits;", "function withdraw() public"),
    ("withdraw_if",
     "if (amount > 0) {\n    deposits[msg.sender] = 0;\n    payable(msg.sender).transfer(amount);\n}",
     "If amount is greater than 0, set user's deposits to 0 and then transfer all the left amount to user.",
     "mapping(address => uint) deposits;", "function withdraw(uint amount) public"),
    ("push_names",
     "for (uint i = 0; i < proposalNames.length; i++) {\n    proposal.push(name[i]);\n}",
     "When i is less than the length of proposal names, push the name at index i to the end of proposal.",
     "bytes32[] proposal;\nbytes32[] name;\nbytes32[] proposalNames;", "function setup() public"),
    ("only_buyer",
     "modifier onlyBuyer() {\n    require(msg.sender == buyer);\n    _;\n}",
     "Confirm that buyer is the current call before calling the function.",
     "address buyer;", None),
    ("hash_abi",
     "return keccak256(abi.encode(a, b, c, d));",
     "Return the keccak256 hash value of encoded a, b, c, d.",
     "", "function hash(uint a, uint b, uint c, uint d) public pure returns (bytes32)"),
    ("debit_sender",
     "balances[msg.sender] -= amount;",
     "Subtract amount from the balance of the sender.",
     "mapping(address => uint) balances;", "function debit(uint amount) public"),
    ("credit_to",
     "balances[to] += amount;",
     "Add the amount to the balance of to.",
     "mapping(address => uint) balances;", "function credit(address to, uint amount) public"),
    ("require_balance",
     'require(balances[msg.sender] >= amount, "insufficient balance");',
     "Make sure the balance of the sender is at least amount, otherwise revert with insufficient balance.",
     "mapping(address => uint) balances;", "function check(uint amount) public view"),
    ("set_owner",
     "owner = msg.sender;",
     "Set the owner to the sender of the message.",
     "address owner;", "constructor()"),
    ("emit_transfer",
     "emit Transfer(msg.sender, to, amount);",
     "Emit a Transfer event from the sender to to with amount.",
     "event Transfer(address from, address to, uint value);", "function send(address to, uint amount) public"),
    ("mint_supply",
     "totalSupply = totalSupply + amount;",
     "Increase the total supply by amount.",
     "uint totalSupply;", "function mint(uint amount) public"),
    ("balance_of",
     "return balances[account];",
     "Return the balance of the account.",
     "mapping(address => uint) balances;", "function balanceOf(address account) public view returns (uint)"),
    ("only_owner",
     "modifier onlyOwner() {\n    require(msg.sender == owner);\n    _;\n}",
     "Check that the caller is the owner before running the function.",
     "address owner;", None),
    ("auction_end",
     "if (block.timestamp > deadline) {\n    ended = true;\n}",
     "If the current block timestamp is later than the deadline, mark the auction as ended.",
     "uint deadline;\nbool ended;", "function close() public"),
    ("record_bid",
     "highestBidder = msg.sender;\nhighestBid = msg.value;",
     "Record the sender as the highest bidder and the value sent as the highest bid.",
     "address highestBidder;\nuint highestBid;", "function bid() public payable"),
    ("count_loop",
     "while (count < 10) {\n    count++;\n}",
     "Keep adding one to count as long as count is less than 10.",
     "uint count;", "function spin() public"),
    ("approve",
     "allowed[msg.sender][spender] = value;",
     "Set the allowance of the spender for the sender to value.",
     "mapping(address => mapping(address => uint)) allowed;", "function approve(address spender, uint value) public"),
    ("fee",
     "uint fee = amount * rate / 100;",
     "Declare fee as amount times rate divided by 100.",
     "uint rate;", "function quote(uint amount) public view returns (uint)"),
    ("destroy",
     "selfdestruct(payable(owner));",
     "Destroy the contract and send its funds to the owner.",
     "address owner;", "function kill() public"),
    ("not_paused",
     "require(!paused);",
     "Revert if the contract is paused.",
     "bool paused;", "function act() public view"),
    ("remove_voter",
     "delete voters[voter];",
     "Remove the voter from voters.",
     "mapping(address => uint) voters;", "function drop(address voter) public"),
    ("pay_beneficiary",
     "payable(beneficiary).transfer(address(this).balance);",
     "Transfer the balance of this contract to the beneficiary.",
     "address beneficiary;", "function payout() public"),
    ("sum_values",
     "for (uint j = 0; j < values.length; j++) {\n    total += values[j];\n}",
     "Add every element of values to total.",
     "uint[] values;\nuint total;", "function sum() public"),
    ("digest",
     "bytes32 digest = sha256(abi.encodePacked(name, salt));",
     "Compute the sha256 hash of the packed name and salt.",
     "", "function digestOf(string memory name, uint salt) public pure"),
    ("deposit",
     "require(msg.value > 0);\ndeposits[msg.sender] += msg.value;\nemit Deposit(msg.sender, msg.value);",
     "Require a positive value, add the sent value to the user's deposits and emit a Deposit event.",
     "mapping(address => uint) deposits;\nevent Deposit(address user, uint amount);",
     "function deposit() public payable"),
]


def _indent(text: str, pad: str) -> str:
    return "\n".join(pad + line if line else line for line in text.splitlines())


def wrap(name: str, snippet: str, state: str, header) -> str:
    body = [_indent(state, "    ")] if state else []
    if header is None:
        body.append(_indent(snippet, "    "))
    else:
        body.append(f"    {header} {{\n{_indent(snippet, '        ')}\n    }}")
    cname = "".join(p.title() for p in name.split("_"))
    return HEADER + f"contract {cname} {{\n" + "\n\n".join(body) + "\n}\n"


def main() -> int:
    batch = [{"name": n, "source": wrap(n, code, state, header)}
             for n, code, _, state, header in SNIPPETS]
    proc = subprocess.run(["node", str(ROOT / "tools" / "solc_batch.js")],
                          input=json.dumps(batch), capture_output=True, text=True, check=True)
    compiled = {c["name"]: c for c in json.loads(proc.stdout)}
    lines = []
    for (name, code, ref, _, header), item in zip(SNIPPETS, batch):
        c = compiled[name]
        if c["errors"] or c["ast"] is None:
            print(f"{name}: compile failed:\n" + "\n".join(c["errors"]), file=sys.stderr)
            return 1
        gas = None
        if header is not None and header.startswith("function "):
            fname = header.split()[1].split("(")[0]
            for sig, est in c["gas"].items():
                if sig.split("(")[0] == fname and str(est).isdigit():
                    gas = int(est)
        lines.append(json.dumps({"name": name, "code": code, "reference": ref, "gas_gwei": gas,
                                 "source": item["source"], "ast": c["ast"]},
                                separators=(",", ":")))
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} records to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
