"""
Running experiments through the harness
=======================================

Every experiment is a `RunConfig`; `run` writes a CSV and a JSON file named
after the config hash and returns the table with its acceptance checks. The
same thing is available from the shell as ``whitham-lab <subcommand>``.
"""

import tempfile

from whitham_lab.harness import make_config, report, report_lines, run

out = tempfile.mkdtemp(prefix="whitham-demo-")
tables = [run(make_config(kind, out=out)) for kind in
          ("symbol-bounds", "convergence", "global-smalldata", "picard")]
tables.append(run(make_config("evolve", n=256, T=2.0, out=out)))

for line in report_lines(report(tables)):
    print(line)
print(f"\nfiles in {out}")
