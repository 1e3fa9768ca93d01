"""
Lloyd, Hartigan and Smartigan on Iris
=====================================

Five hundred random-assignment starts per k, each shared by all three
methods.  The printed table has the mean final loss per method and the
average percent difference against Hartigan.
"""

import dataclasses
import os

from smartigan.bench import load_experiment, run_experiment
from smartigan.dataio import render_report

HERE = os.path.dirname(os.path.abspath(__file__))
spec = load_experiment(os.path.join(HERE, "..", "experiments", "iris.ini"))

###############################################################################
# Fewer runs keep this quick; the experiment file asks for 500.

spec = dataclasses.replace(spec, runs_per_instance=100)
cells = run_experiment(spec)
print(render_report(cells, "markdown", title=f"# Iris (master_seed={spec.master_seed})"))

###############################################################################
# Each cell keeps its per-run records, so win/tie/loss counts against the
# baseline come for free.

for cell in cells:
    s = cell.stats["smartigan"]
    print(f"k={cell.k:2d}  smartigan beats hartigan in {s.wins} runs, ties {s.ties}, loses {s.losses}")
