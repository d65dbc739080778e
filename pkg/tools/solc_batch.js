// Compile a batch of single-file contracts with solc-js.
// stdin: [{"name": ..., "source": ...}]   stdout: [{"name", "ast", "gas", "errors"}]
const solcPath = process.env.SOLCJS || 'solc';
const solc = require(solcPath);
const fs = require('fs');
const batch = JSON.parse(fs.readFileSync(0, 'utf8'));
const out = [];
for (const item of batch) {
  const file = item.name + '.sol';
  const input = {
    language: 'Solidity',
    sources: {[file]: {content: item.source}},
    settings: {outputSelection: {'*': {'': ['ast'], '*': ['evm.gasEstimates']}}},
  };
  const res = JSON.parse(solc.compile(JSON.stringify(input)));
  const errors = (res.errors || []).filter(e => e.severity === 'error').map(e => e.formattedMessage);
  const contracts = (res.contracts || {})[file] || {};
  const gas = {};
  for (const c of Object.values(contracts)) {
    const est = (c.evm || {}).gasEstimates || {};
    Object.assign(gas, est.external || {}, est.internal || {});
  }
  out.push({name: item.name, ast: res.sources && res.sources[file] ? res.sources[file].ast : null, gas, errors});
}
process.stdout.write(JSON.stringify(out));
