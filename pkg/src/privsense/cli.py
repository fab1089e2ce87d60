"""Command-line interface: keygen, publish, reconstruct, sweep, synth."""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset, keys, pipeline, sweep
from .errors import PrivsenseError
from .reconstruct import AuthorizationLevel
from .rng import DATASET, RngStream
from .sweep import ExperimentConfig


def _parse_seed(text: str) -> int:
    return int(text, 16) if text.lower().startswith("0x") else int(text)


def _add_common(parser):
    parser.add_argument("--seed", default="0", help="master seed "
                        "(decimal or 0x-hex)")


def cmd_keygen(args):
    master = RngStream(_parse_seed(args.seed))
    bundle = AuthorizationLevel.parse(args.bundle)
    if args.power_cap is not None:
        power_cap = args.power_cap
    elif args.infile is not None:
        table = dataset.load_table_csv(args.infile)
        meas_seed = master.child(1).draw_seed()  # probe ensemble only
        ens = keys.sensing.build_ensemble(
            table.n_features, args.measurement_rate, RngStream(meas_seed),
            normalization=args.normalization)
        norms = np.linalg.norm(table.values @ ens.phi.T, axis=1)
        power_cap = args.power_fraction * float(np.median(norms))
    else:
        raise PrivsenseError("either --power-cap or --in is required to "
                             "size the embedding power")
    keyset = keys.keygen(args.n, args.measurement_rate, args.embedding_rate,
                         power_cap, master, args.keys,
                         normalization=args.normalization, bundle=bundle)
    print(f"wrote measurement key (n={keyset.measurement.n}, "
          f"m={keyset.measurement.m}) to {args.keys}")
    if keyset.coding is not None:
        print(f"wrote coding key (M={keyset.coding.message_len}, "
              f"power cap {keyset.coding.power_cap:.6g})")


def cmd_publish(args):
    table = dataset.load_table_csv(args.infile)
    keyset = keys.load_keyset(args.keys, AuthorizationLevel.L2
                              if not args.no_embed else AuthorizationLevel.L1)
    ensemble = keyset.measurement.materialize()
    coding = keyset.coding.materialize() if keyset.coding is not None else None
    sparsify = args.sparsify
    if sparsify is not None:
        sparsify = sweep.parse_sparsity_rule(sparsify, ensemble.m)
    result = pipeline.publish_table(
        table.values, ensemble, coding, args.epsilon, args.calibration,
        RngStream(_parse_seed(args.seed)),
        embed_messages=not args.no_embed, sparsify_level=sparsify)
    pipeline.save_published_csv(result, args.out)
    print(f"published {result.measurements.shape[0]} records at "
          f"m={result.measurements.shape[1]} (epsilon={args.epsilon}, "
          f"scale={result.provenance['calibration']['scale']:.6g}) "
          f"to {args.out}")


def cmd_reconstruct(args):
    level = AuthorizationLevel.parse(args.level)
    published, provenance = pipeline.load_published_csv(args.infile)
    ensemble = coding = None
    if level != AuthorizationLevel.L0:
        keyset = keys.load_keyset(args.keys, level)
        ensemble = keyset.measurement.materialize()
        if level == AuthorizationLevel.L2:
            coding = keyset.coding.materialize()
    result = pipeline.reconstruct_table(
        published, level, ensemble=ensemble, coding_key=coding,
        provenance=provenance, delta=args.delta)
    rows, cols = result.x_star.shape
    header = ["rec_id"] + [f"x_{j + 1}" for j in range(cols)]
    lines = [",".join(header)]
    for i in range(rows):
        lines.append(",".join([str(i)] + [repr(float(v))
                                          for v in result.x_star[i]]))
    Path(args.out).write_text("\n".join(lines) + "\n")
    diagnostics = {
        "level": level.value,
        "input_kind": result.input_kind,
        "records": rows,
        "converged": [bool(b) for b in result.converged],
        "stages": {
            stage: [{"residual": c.residual, "lam": c.lam,
                     "kkt_violation": c.kkt_violation,
                     "converged": c.converged, "note": c.note}
                    for c in certs]
            for stage, certs in result.certificates.items()
        },
    }
    if result.bits is not None:
        diagnostics["decoded_bits"] = result.bits
    Path(str(args.out) + ".diagnostics.json").write_text(
        json.dumps(diagnostics, sort_keys=True, indent=2) + "\n")
    print(f"reconstructed {rows} records at level {level.value} "
          f"to {args.out}")


def cmd_sweep(args):
    config = ExperimentConfig(
        epsilons=tuple(args.epsilon),
        trials=args.trials,
        levels=tuple(args.level),
        records=args.records,
        features=args.features,
        measurement_rate=args.measurement_rate,
        embedding_rate=args.embedding_rate,
        power_fraction=args.power_fraction,
        calibration=args.calibration,
        sparsity_rule=args.sparsity_rule,
        embed=not args.no_embed,
        master_seed=_parse_seed(args.seed),
        jobs=args.jobs,
    )
    result = sweep.run_sweep(config)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    sweep.write_report_csv(result, out)
    sweep.write_summary_json(result, str(out) + ".summary.json")
    print(f"swept {len(config.epsilons)} budgets x {config.trials} trials; "
          f"{len(result.rows)} metric rows to {out}")
    if result.failures:
        print(f"warning: {len(result.failures)} cells failed; "
              "see the summary file", file=sys.stderr)


def cmd_synth(args):
    table = dataset.synthesize_dataset(
        args.records, args.features, args.sparsity,
        RngStream(_parse_seed(args.seed)).child(DATASET),
        labeled=args.labeled)
    dataset.save_table_csv(table, args.out)
    print(f"wrote {table.n_records} synthetic records "
          f"({table.n_features} features, sparsity {args.sparsity}) "
          f"to {args.out}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="privsense",
        description="Differentially private compressive publication of "
                    "tabular data with tiered reconstruction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="derive and write key files")
    _add_common(p)
    p.add_argument("--n", type=int, required=True,
                   help="encoded table width the keys are sized for")
    p.add_argument("--measurement-rate", type=float, default=0.5)
    p.add_argument("--embedding-rate", type=float, default=0.2)
    p.add_argument("--power-fraction", type=float, default=0.1)
    p.add_argument("--power-cap", type=float, default=None,
                   help="explicit embedding power cap (skips --in)")
    p.add_argument("--normalization", default="unit-column",
                   choices=["unit-column", "raw-scaled"])
    p.add_argument("--bundle", default="l2", choices=["l1", "l2"],
                   help="l1 bundles omit the coding key")
    p.add_argument("--in", dest="infile", default=None,
                   help="table CSV used to size the embedding power")
    p.add_argument("--keys", required=True, help="output key directory")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("publish", help="publish a table")
    _add_common(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--calibration", default="calibrated",
                   choices=["paper", "calibrated"])
    p.add_argument("--sparsity-rule", dest="sparsify", default=None,
                   help="optional coefficient thresholding, e.g. m/6")
    p.add_argument("--no-embed", action="store_true")
    p.set_defaults(func=cmd_publish)

    p = sub.add_parser("reconstruct", help="reconstruct a published table")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--keys", default=None)
    p.add_argument("--level", required=True, choices=["l0", "l1", "l2"])
    p.add_argument("--delta", type=float, default=None,
                   help="override the provenance-derived solver radius")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sweep", help="run a budget sweep experiment")
    _add_common(p)
    p.add_argument("--out", required=True, help="report CSV path")
    p.add_argument("--epsilon", type=float, nargs="+",
                   default=[0.01, 0.05, 0.1, 0.4, 0.8, 1.6])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--level", nargs="+", default=["l0", "l1", "l2"],
                   choices=["l0", "l1", "l2"])
    p.add_argument("--records", type=int, default=200)
    p.add_argument("--features", type=int, default=64)
    p.add_argument("--measurement-rate", type=float, default=0.5)
    p.add_argument("--embedding-rate", type=float, default=0.2)
    p.add_argument("--power-fraction", type=float, default=0.1)
    p.add_argument("--calibration", default="calibrated",
                   choices=["paper", "calibrated"])
    p.add_argument("--sparsity-rule", default="m/6")
    p.add_argument("--no-embed", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic sparse table")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--records", type=int, default=200)
    p.add_argument("--features", type=int, default=64)
    p.add_argument("--sparsity", type=int, default=5)
    p.add_argument("--labeled", action="store_true")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except PrivsenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
