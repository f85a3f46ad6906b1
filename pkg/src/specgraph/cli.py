"""Command-line front end.

Subcommands: laplacian, spectrum, filter, lanczos, gen-sbm, train, eval.
Failures print ``ERROR <code>: <message>`` on stderr and exit with 2
(configuration), 3 (data) or 4 (numerical).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import gcn
from .errors import ConfigError, SpecGraphError
from .filters import apply_filter, renormalized_adjacency, spec_from_json
from .formats import fmt, format_coo, format_matrix_csv, read_signal, read_text, write_signal, write_text
from .graph import EdgeListData, connected_components, read_edge_list
from .lanczos import parse_function, theorem_bound_check
from .laplacian import LaplacianKind, laplacian
from .spectral import eigendecompose


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


class _NumericMismatch(SpecGraphError):
    code = "SpectrumMismatch"
    exit_status = 4


def _load_graph(path: str) -> EdgeListData:
    if not os.path.isfile(path):
        raise ConfigError(f"--graph: no such file {path!r}")
    return read_edge_list(path)


def _require_file(flag: str, path: str) -> str:
    if not os.path.isfile(path):
        raise ConfigError(f"{flag}: no such file {path!r}")
    return path


def _write_mapping(data: EdgeListData, out: str) -> None:
    if data.labels is not None:
        write_text(out + ".nodes.tsv", "".join(f"{i}\t{lab}\n" for i, lab in enumerate(data.labels)))


def _kind(text: str) -> LaplacianKind:
    try:
        return LaplacianKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _m_sweep(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}; use A..B or a single integer") from None
    if not values or values[0] < 1:
        raise argparse.ArgumentTypeError(f"sweep {text!r} must cover positive integers")
    return values


def cmd_laplacian(args) -> int:
    data = _load_graph(args.graph)
    L = laplacian(data.graph, args.kind)
    text = format_coo(L.mat) if args.format == "coo" else format_matrix_csv(L.mat)
    write_text(args.out, text)
    _write_mapping(data, args.out)
    return 0


def cmd_spectrum(args) -> int:
    data = _load_graph(args.graph)
    basis = eigendecompose(laplacian(data.graph, args.kind))
    zeros = basis.zero_multiplicity()
    components = connected_components(data.graph).component_count
    lines = [fmt(x) for x in basis.lam]
    lines.append(f"zero_multiplicity={zeros},component_count={components}")
    write_text(args.out, "\n".join(lines) + "\n")
    _write_mapping(data, args.out)
    if args.kind in (LaplacianKind.COMBINATORIAL, LaplacianKind.SYM_NORMALIZED) and zeros != components:
        raise _NumericMismatch(f"zero multiplicity {zeros} != component count {components}")
    return 0


def cmd_filter(args) -> int:
    data = _load_graph(args.graph)
    spec = spec_from_json(read_text(_require_file("--spec", args.spec)))
    f = read_signal(_require_file("--signal", args.signal))
    y = apply_filter(spec, data.graph, f, method=args.method)
    write_signal(args.out, y)
    _write_mapping(data, args.out)
    return 0


def cmd_lanczos(args) -> int:
    data = _load_graph(args.graph)
    g_fn = parse_function(args.g)
    f = read_signal(_require_file("--signal", args.signal))
    if f.ndim != 1:
        raise ConfigError("--signal: Lanczos takes a single-column signal")
    L = laplacian(data.graph, args.kind)
    if args.m_sweep[-1] > L.n:
        raise ConfigError(f"--m-sweep: M={args.m_sweep[-1]} exceeds node count {L.n}")
    basis = eigendecompose(L)
    rows = ["M,error,bound,satisfied"]
    for M in args.m_sweep:
        check = theorem_bound_check(L, g_fn, f, M, basis=basis)
        rows.append(f"{M},{fmt(check.error)},{fmt(check.bound)},{str(check.satisfied).lower()}")
    write_text(args.out, "\n".join(rows) + "\n")
    _write_mapping(data, args.out)
    return 0


def cmd_gen_sbm(args) -> int:
    g, ds = gcn.generate_sbm(args.blocks, args.nodes_per_block, args.p_in, args.p_out, args.noise, args.seed)
    gcn.save_dataset(args.out, g, ds)
    return 0


def _load_data(directory: str):
    if not os.path.isdir(directory):
        raise ConfigError(f"--data: no such directory {directory!r}")
    return gcn.load_dataset(directory)


def cmd_train(args) -> int:
    g, ds = _load_data(args.data)
    F = ds.num_classes
    model = gcn.model_for_graph(g, ds.features.shape[1], args.hidden, F, seed=args.seed)
    model, history = gcn.train(model, ds, args.epochs, args.lr)
    write_text(args.model, gcn.model_to_json(model))
    if args.history:
        write_text(args.history, gcn.format_history(history))
    last = history[-1]
    print(f"epochs={args.epochs} loss={fmt(last.loss)} train_acc={fmt(last.train_acc)} val_acc={fmt(last.val_acc)}")
    return 0


def cmd_eval(args) -> int:
    g, ds = _load_data(args.data)
    model = gcn.model_from_json(read_text(_require_file("--model", args.model)), renormalized_adjacency(g))
    mask = {"train": ds.train_mask, "val": ds.val_mask, "test": ds.test_mask}[args.mask]
    acc = gcn.evaluate(model, ds, mask)
    line = f"accuracy={fmt(acc)}"
    print(line)
    if args.out:
        write_text(args.out, line + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="specgraph", description="Spectral graph filtering and GCN tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("laplacian", help="write a Laplacian matrix")
    s.add_argument("--graph", required=True)
    s.add_argument("--kind", type=_kind, default=LaplacianKind.COMBINATORIAL)
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("csv", "coo"), default="csv")
    s.set_defaults(func=cmd_laplacian)

    s = sub.add_parser("spectrum", help="write Laplacian eigenvalues")
    s.add_argument("--graph", required=True)
    s.add_argument("--kind", type=_kind, default=LaplacianKind.SYM_NORMALIZED)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("filter", help="apply a filter spec to a signal")
    s.add_argument("--graph", required=True)
    s.add_argument("--spec", required=True)
    s.add_argument("--signal", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--method", choices=("direct", "exact"), default="direct")
    s.set_defaults(func=cmd_filter)

    s = sub.add_parser("lanczos", help="Lanczos error vs bound over a sweep of M")
    s.add_argument("--graph", required=True)
    s.add_argument("--g", required=True, help="exp-neg | heat:t | poly:c0,c1,...")
    s.add_argument("--signal", required=True)
    s.add_argument("--m-sweep", type=_m_sweep, required=True, help="A..B or M")
    s.add_argument("--kind", type=_kind, default=LaplacianKind.SYM_NORMALIZED)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_lanczos)

    s = sub.add_parser("gen-sbm", help="generate a stochastic-block-model dataset")
    s.add_argument("--blocks", type=int, default=3)
    s.add_argument("--nodes-per-block", type=int, default=20)
    s.add_argument("--p-in", type=float, default=0.5)
    s.add_argument("--p-out", type=float, default=0.05)
    s.add_argument("--noise", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_gen_sbm)

    s = sub.add_parser("train", help="train a two-layer GCN")
    s.add_argument("--data", required=True, help="dataset directory")
    s.add_argument("--hidden", type=int, default=16)
    s.add_argument("--epochs", type=int, default=200)
    s.add_argument("--lr", type=float, default=0.2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--model", required=True, help="checkpoint JSON to write")
    s.add_argument("--history", help="history CSV to write")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="accuracy of a trained GCN")
    s.add_argument("--data", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--mask", choices=("train", "val", "test"), default="test")
    s.add_argument("--out")
    s.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SpecGraphError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    except (ValueError, KeyError) as exc:
        print(f"ERROR DataError: {exc}", file=sys.stderr)
        return 3
    except np.linalg.LinAlgError as exc:
        print(f"ERROR NumericalError: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"ERROR ConfigError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
