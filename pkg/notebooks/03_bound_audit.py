"""
Measured sizes against the constant bounds
==========================================

Runs the full pipeline on a few corpus seeds and prints the audit: N↑ unions
per level, strong reachability under the canonical ordering, blocks and
landmark sets, all next to their bounds in h and k.
"""

# %%
from nlcencode.generate import gen_random
from nlcencode.pipeline import corpus_config, run_pipeline

for seed in (0, 1, 5):
    report, _ = run_pipeline(gen_random(corpus_config(seed)), ladder_budget=20_000)
    print(report.format())

# %%
# the strong reachability sets stay tiny next to the bound
report, j = run_pipeline(gen_random(corpus_config(2)), ladder_budget=20_000)
audit = report.audit
print("SReach max", audit.sreach_max)
print("N↑ slice", audit.nup_slice)
print("N↑ aggregate", audit.nup_aggregate)
print("level kinds", audit.nup_kind)
