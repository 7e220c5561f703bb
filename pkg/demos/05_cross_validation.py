"""Run the 10-fold cross-validation protocol and the three-model comparison
table on the synthetic set. Point STATLOG/CLEVELAND paths at the public UCI
files to reproduce the real-data comparison.

Run: python3 demos/05_cross_validation.py
"""

import os

from cardioseq import data as dp
from cardioseq import evaluation as ev
from cardioseq import synthetic
from cardioseq import training as tr

DATA_DIR = os.environ.get("CARDIOSEQ_DATA_DIR", "data")
STATLOG = os.path.join(DATA_DIR, "heart.dat")
CLEVELAND = os.path.join(DATA_DIR, "processed.cleveland.data")

datasets = {"synthetic": synthetic.separable_dataset(200, seed=1)}
if os.path.exists(STATLOG):
    datasets["statlog"] = dp.parse_dataset(STATLOG, "statlog")
if os.path.exists(CLEVELAND):
    datasets["cleveland"] = dp.parse_dataset(CLEVELAND, "cleveland")

report = ev.cross_validate(
    datasets["synthetic"], "dv_logistic", k=10, seed=0
)
print(ev.report_to_text(report))

hyper = tr.Hyperparams(epochs=20, seed=0)  # shortened for a quick demo
table = ev.compare_models(datasets, hyper=hyper, k=10, seed=0)
print(ev.table_to_text(table))
