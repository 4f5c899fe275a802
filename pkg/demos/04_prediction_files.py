"""File formats and the command-line interface.

Prediction vectors travel as CSV (portable, editable) or as the packed
binary format (magic "SPXD", row count, dimension, little-endian f32
rows) with labels in a one-integer-per-line sidecar. The CLI wraps the
library: `simulate` writes datasets, `cluster` fits one method and emits
a JSON report, `bench` runs a config-driven method-by-run matrix.

Run: python3 demos/04_prediction_files.py
"""
import json
import pathlib
import tempfile

from sbetas import cli, load_predictions, load_spxd, sample_dirichlet_mixture, save_csv, save_spxd, simu_spec

workdir = pathlib.Path(tempfile.mkdtemp(prefix="sbetas-demo-"))
print(f"working in {workdir}\n")

# Round-trip the two on-disk formats.
ds = sample_dirichlet_mixture(simu_spec(n=1000, seed=0))
csv_path = workdir / "points.csv"
bin_path = workdir / "points.spxd"
save_csv(csv_path, ds.data)
save_spxd(bin_path, ds.data)
print(f"CSV bytes:    {csv_path.stat().st_size:>8}")
print(f"binary bytes: {bin_path.stat().st_size:>8} "
      "(4 magic + 8 header + n*d*4)")
assert load_predictions(csv_path).shape == (1000, 3)
assert load_spxd(bin_path).shape == (1000, 3)

# The CLI is plain argparse; calling main() in-process is equivalent to
# the console script. Exit codes: 0 ok, 1 config error, 2 data error,
# 3 method failure.
print("\n$ sbetas simulate --dataset simu --n 2000 --seed 1 --out data.csv")
cli.main(["simulate", "--dataset", "simu", "--n", "2000", "--seed", "1",
          "--out", str(workdir / "data.csv")])

report_path = workdir / "report.json"
print("\n$ sbetas cluster --method k-sbetas --input data.csv "
      "--labels data.labels.txt --align argmax --out report.json")
code = cli.main([
    "cluster", "--method", "k-sbetas",
    "--input", str(workdir / "data.csv"),
    "--labels", str(workdir / "data.labels.txt"),
    "--align", "argmax",
    "--out", str(report_path),
])
print(f"exit code {code}")
record = json.loads(report_path.read_text())["runs"][0]
print(f"NMI {100 * record['nmi']:.1f}, accuracy {100 * record['accuracy']:.1f}, "
      f"{record['iterations']} iterations in {record['seconds']:.3f}s")

# A bench config is an INI file: one [dataset], one [bench], one
# [method <name>] section per method. A second tag reruns a method under
# different options.
ini = workdir / "bench.ini"
ini.write_text("""\
[dataset]
name = simu
n = 2000
seed = 0

[bench]
runs = 3
align = argmax

[method argmax]
[method k-means]
[method k-sbetas]
[method k-sbetas biased]
pi = uniform
""")
print("\n$ sbetas bench --config bench.ini --out bench_out/")
cli.main(["bench", "--config", str(ini), "--out", str(workdir / "bench_out")])
