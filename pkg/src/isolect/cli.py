"""Command-line interface.

Subcommands: distances, build, compare-borrowings, calibrate, simulate,
render. All numeric output is fixed at 3 decimals and outputs carry no
timestamps, so identical inputs and flags give byte-identical files.
Exit codes: 0 success, 1 runtime error, 2 input validation error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import decay, draw, treeio
from .dendrogram import (
    Dendrogram,
    RootLink,
    ancestor_depth,
    attach_depth,
    endpoint_depths,
    fit_report,
    root_geometry,
)
from .errors import DomainError, InputFormatError, IsolectError
from .lexstat import (
    CoincidenceMatrix,
    coincidence_from_cognacy,
    distance_matrix,
)
from .reconstruct import build_dendrogram, redistribute_residuals, two_language_family
from .simulate import recovery_trial, simulate_cognacy

__all__ = ["entry", "main"]


def _load_matrix(args) -> CoincidenceMatrix:
    if args.format == "matrix":
        m = treeio.read_coincidence_matrix(args.input)
        if getattr(args, "exclude_borrowed", False):
            raise InputFormatError(
                "--exclude-borrowed requires --format cognacy (matrix files "
                "carry no borrowing flags)"
            )
    else:
        table = treeio.read_cognacy_table(args.input)
        m = coincidence_from_cognacy(
            table, exclude_borrowed=getattr(args, "exclude_borrowed", False)
        )
    if getattr(args, "round_matrix", False):
        values = np.round(m.values)
        m = CoincidenceMatrix(m.labels, values, list_size=m.list_size)
    return m


def _out_path(args, name: str) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def _write(path: Path, content: str) -> None:
    path.write_text(content, encoding="utf-8", newline="\n")
    print(f"wrote {path}")


def _distance_table(m: CoincidenceMatrix) -> str:
    dm = distance_matrix(m)
    lines = ["language_a\tlanguage_b\tcoincidence\tdistance"]
    for a, b, value in m.pairs():
        lines.append(f"{a}\t{b}\t{value:.3f}\t{dm.value(a, b):.3f}")
    return "\n".join(lines) + "\n"


def cmd_distances(args) -> int:
    m = _load_matrix(args)
    _write(_out_path(args, "distances.txt"), _distance_table(m))
    return 0


def _describe_tree(tree: Dendrogram, steps) -> str:
    lines = []
    labels = tree.leaves()
    lines.append(f"languages ({len(labels)}): {', '.join(labels)}")
    lines.append("")
    if isinstance(tree.root, RootLink):
        link = tree.root
        h_l = attach_depth(link.left)
        h_r = attach_depth(link.right)
        chain = root_geometry(tree, variant="max_chain")
        point = root_geometry(tree, variant="deep_point")
        lines.append("root link (configuration undetermined without external data):")
        lines.append(f"  length: {link.length:.3f}")
        lines.append(
            f"  joins subtree tops at depths {h_l:.3f} and {h_r:.3f}"
        )
        lines.append(
            f"  variant max_chain: width {chain.chain_width:.3f} at depth "
            f"{chain.depth:.3f}, verticals {chain.left_vertical:.3f} / "
            f"{chain.right_vertical:.3f}"
        )
        lines.append(
            f"  variant deep_point: ancestor point at depth {point.depth:.3f}, "
            f"verticals {point.left_vertical:.3f} / {point.right_vertical:.3f}"
        )
        lines.append("")
    if len(labels) == 2 and isinstance(tree.root, RootLink):
        family = two_language_family(tree.root.length)
        lines.append("two-language ambiguity family:")
        lines.append(
            f"  any divergence time a' in [0.000, {family.max_divergence:.3f}] "
            f"with chain width {family.total:.3f} - 2a' fits the data"
        )
        lines.append(
            f"  endpoints: divergence from a point {family.max_divergence:.3f} "
            f"swadesh ago, or a contemporary chain of width {family.total:.3f} "
            "(lexifier-pidgin limit)"
        )
        lines.append("")
    nodes = tree.chain_nodes()
    if nodes:
        clades = tree.clades()
        lines.append("chain nodes:")
        for node in nodes:
            d_l, d_r = endpoint_depths(node)
            members = ", ".join(sorted(clades[node.id]))
            lines.append(
                f"  {node.id}: width {node.width:.3f} at depth "
                f"{max(d_l, d_r):.3f}; attach side {node.attach_side}"
            )
            left_name = node.left.label if hasattr(node.left, "label") else node.left.id
            right_name = node.right.label if hasattr(node.right, "label") else node.right.id
            lines.append(f"      left {left_name} (edge {node.left_edge:.3f})")
            lines.append(f"      right {right_name} (edge {node.right_edge:.3f})")
            lines.append(f"      covers: {members}")
        lines.append("")
    if steps:
        lines.append("join steps:")
        for step in steps:
            lines.append(
                f"  {step.node_id}: joined ({step.pair[0]}, {step.pair[1]}) at "
                f"distance {step.pair_distance:.3f}; mean signed difference "
                f"{step.mean_signed_difference:.3f}, depth correction "
                f"{step.depth_correction:.3f}, width {step.chain_width:.3f}"
            )
            if step.path_residual > 1e-9:
                lines.append(
                    f"      geometry clamped, path excess {step.path_residual:.3f}"
                )
        lines.append("")
    lines.append("parenthesized (widths in bracket annotations):")
    lines.append("  " + treeio.parenthesized(tree))
    return "\n".join(lines) + "\n"


def _fit_text(tree: Dendrogram, m: CoincidenceMatrix) -> str:
    report = fit_report(tree, m)
    lines = [
        "language_a\tlanguage_b\tmeasured_L\ttheoretical_L\tresidual_L"
        "\tmeasured_C\ttheoretical_C\tresidual_C"
    ]
    for row in report.pairs:
        lines.append(
            f"{row.pair[0]}\t{row.pair[1]}\t{row.measured_distance:.3f}"
            f"\t{row.theoretical_distance:.3f}\t{row.residual_distance:.3f}"
            f"\t{row.measured_coincidence:.3f}\t{row.theoretical_coincidence:.3f}"
            f"\t{row.residual_coincidence:.3f}"
        )
    lines.append("")
    lines.append(f"rms residual (swadesh): {report.rms_distance:.3f}")
    lines.append(f"max |residual| (swadesh): {report.max_abs_distance:.3f}")
    lines.append(f"rms residual (coincidence): {report.rms_coincidence:.3f}")
    lines.append(f"max |residual| (coincidence): {report.max_abs_coincidence:.3f}")
    return "\n".join(lines) + "\n"


def cmd_build(args) -> int:
    m = _load_matrix(args)
    if m.k < 2:
        raise InputFormatError("reconstruction needs at least 2 languages")
    tree, steps = build_dendrogram(m)
    adjusted = redistribute_residuals(tree, m)
    treeio.save_dendrogram(tree, _out_path(args, "tree.json"))
    print(f"wrote {_out_path(args, 'tree.json')}")
    _write(_out_path(args, "tree.txt"), _describe_tree(tree, steps))
    _write(_out_path(args, "fit_report.txt"), _fit_text(tree, m))
    treeio.save_dendrogram(adjusted, _out_path(args, "tree_adjusted.json"))
    print(f"wrote {_out_path(args, 'tree_adjusted.json')}")
    _write(_out_path(args, "fit_report_adjusted.txt"), _fit_text(adjusted, m))
    if args.svg:
        _write(_out_path(args, "tree.svg"), draw.render_svg(tree))
    return 0


def _clade_depths(tree: Dendrogram) -> dict:
    clades = tree.clades()
    nodes = {n.id: n for n in tree.chain_nodes()}
    return {
        clades[node_id]: max(endpoint_depths(node))
        for node_id, node in nodes.items()
    }


def cmd_compare_borrowings(args) -> int:
    table = treeio.read_cognacy_table(args.input)
    m_all = coincidence_from_cognacy(table, exclude_borrowed=False)
    n3 = table.borrowed_slot_count()
    treeio.write_coincidence_matrix(m_all, _out_path(args, "matrix_included.csv"))
    print(f"wrote {_out_path(args, 'matrix_included.csv')}")
    tree_all, steps_all = build_dendrogram(m_all)
    treeio.save_dendrogram(tree_all, _out_path(args, "tree_included.json"))
    print(f"wrote {_out_path(args, 'tree_included.json')}")
    _write(_out_path(args, "tree_included.txt"), _describe_tree(tree_all, steps_all))
    if args.svg:
        _write(_out_path(args, "tree_included.svg"), draw.render_svg(tree_all))
    if n3 == 0:
        print(
            "warning: no borrowed flags present; produced a single run",
            file=sys.stderr,
        )
        return 0
    m_excl = coincidence_from_cognacy(table, exclude_borrowed=True)
    treeio.write_coincidence_matrix(m_excl, _out_path(args, "matrix_excluded.csv"))
    print(f"wrote {_out_path(args, 'matrix_excluded.csv')}")
    tree_excl, steps_excl = build_dendrogram(m_excl)
    treeio.save_dendrogram(tree_excl, _out_path(args, "tree_excluded.json"))
    print(f"wrote {_out_path(args, 'tree_excluded.json')}")
    _write(_out_path(args, "tree_excluded.txt"), _describe_tree(tree_excl, steps_excl))
    if args.svg:
        _write(_out_path(args, "tree_excluded.svg"), draw.render_svg(tree_excl))

    dm_all = distance_matrix(m_all)
    dm_excl = distance_matrix(m_excl)
    lines = []
    lines.append(f"list size with borrowings: {m_all.list_size}")
    lines.append(f"borrowed slots excluded: {n3}")
    lines.append(f"effective list size: {m_excl.list_size}")
    expected = 100.0 * np.log(m_all.list_size / (m_all.list_size - n3))
    lines.append(
        f"uniform shift s for same-slot borrowings: {expected:.3f} "
        "(holds exactly only when the excluded slots coincide nowhere)"
    )
    lines.append("")
    lines.append("pairwise distance change (excluded - included):")
    deltas = []
    for a, b, _ in m_all.pairs():
        delta = dm_excl.value(a, b) - dm_all.value(a, b)
        deltas.append(delta)
        lines.append(f"  {a}\t{b}\t{delta:.3f}")
    lines.append(
        f"  mean {np.mean(deltas):.3f}, min {np.min(deltas):.3f}, "
        f"max {np.max(deltas):.3f}"
    )
    lines.append("")
    lines.append("matched clades (depth = vertical position of the chain):")
    depths_all = _clade_depths(tree_all)
    widths_all = {
        tree_all.clades()[n.id]: n.width for n in tree_all.chain_nodes()
    }
    depths_excl = _clade_depths(tree_excl)
    widths_excl = {
        tree_excl.clades()[n.id]: n.width for n in tree_excl.chain_nodes()
    }
    for clade in sorted(depths_all, key=lambda c: sorted(c)):
        name = "{" + ", ".join(sorted(clade)) + "}"
        if clade in depths_excl:
            lines.append(
                f"  {name}: depth {depths_all[clade]:.3f} -> "
                f"{depths_excl[clade]:.3f}, width {widths_all[clade]:.3f} -> "
                f"{widths_excl[clade]:.3f}"
            )
        else:
            lines.append(f"  {name}: not recovered after exclusion")
    lines.append("")
    lines.append(
        f"ancestor depth (deep-point variant): {ancestor_depth(tree_all):.3f} -> "
        f"{ancestor_depth(tree_excl):.3f}"
    )
    _write(_out_path(args, "delta_summary.txt"), "\n".join(lines) + "\n")
    return 0


def cmd_calibrate(args) -> int:
    params = decay.DecayParams(rate=args.rate, alpha=args.alpha, shift=args.shift)
    lines = ["distance\tlinear\tlinear_shifted\trefit_linear\tquadratic\tstarostin"]
    reduced = decay.refit_rate(params, args.t0)
    for l in args.distances:
        if l < 0:
            raise InputFormatError(f"distances must be >= 0, got {l}")
        lines.append(
            f"{l:.3f}"
            f"\t{decay.time_linear(l, params):.3f}"
            f"\t{decay.time_linear_shifted(l, params):.3f}"
            f"\t{l / (100.0 * reduced):.3f}"
            f"\t{decay.time_quadratic(l, params):.3f}"
            f"\t{decay.time_starostin(l, params):.3f}"
        )
    _write(_out_path(args, "times.txt"), "\n".join(lines) + "\n")
    curves = decay.sample_curves(args.l_max, args.step, params, t0=args.t0)
    rows = ["curve,distance,time"]
    for curve in curves:
        for l, t in zip(curve.distances, curve.times):
            rows.append(f"{curve.tag},{l:.3f},{t:.3f}")
    _write(_out_path(args, "curves.csv"), "\n".join(rows) + "\n")
    return 0


def cmd_simulate(args) -> int:
    cfg = treeio.load_simulation_config(args.input)
    if args.seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=args.seed)
    table = simulate_cognacy(cfg, replicate=0)
    treeio.write_cognacy_table(table, _out_path(args, "cognacy.tsv"))
    print(f"wrote {_out_path(args, 'cognacy.tsv')}")
    report = recovery_trial(cfg)
    lines = [
        f"slots: {cfg.slots}",
        f"seed: {cfg.seed}",
        f"replicates: {cfg.replicates}",
        "",
    ]
    for rep in report.replicates:
        err = "inf" if rep.max_length_error == float("inf") else f"{rep.max_length_error:.3f}"
        lines.append(
            f"replicate {rep.replicate}: topology_match="
            f"{'yes' if rep.topology_match else 'no'}, max_length_error={err}, "
            f"max_path_error={rep.max_path_error:.3f}"
        )
    lines.append("")
    lines.append(
        f"all topologies match: {'yes' if report.all_topologies_match else 'no'}"
    )
    worst = report.worst_length_error
    worst_text = "inf" if worst == float("inf") else f"{worst:.3f}"
    lines.append(f"worst length error: {worst_text}")
    lines.append(f"worst path error: {report.worst_path_error:.3f}")
    _write(_out_path(args, "recovery_report.txt"), "\n".join(lines) + "\n")
    return 0


def cmd_render(args) -> int:
    tree = treeio.load_dendrogram(args.input)
    _write(_out_path(args, "tree.svg"), draw.render_svg(tree))
    return 0


def _add_io_flags(p, cognacy_only=False):
    p.add_argument("--input", required=True, help="input file path")
    if not cognacy_only:
        p.add_argument(
            "--format",
            choices=("matrix", "cognacy"),
            default="matrix",
            help="input kind (default: matrix)",
        )
        p.add_argument(
            "--exclude-borrowed",
            action="store_true",
            help="drop slots flagged as borrowed in any language (cognacy input)",
        )
        p.add_argument(
            "--round-matrix",
            action="store_true",
            help="round coincidence values to whole percent before processing",
        )
    p.add_argument("--out-dir", required=True, help="directory for output files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isolect",
        description=(
            "Reconstruct the prior state of a language system from a "
            "basic-list coincidence matrix, analyze borrowing-exclusion "
            "effects, and calibrate swadesh distances to time."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distances", help="convert a coincidence matrix to distances")
    _add_io_flags(p)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("build", help="reconstruct the dendrogram")
    _add_io_flags(p)
    p.add_argument("--svg", action="store_true", help="also render an SVG drawing")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser(
        "compare-borrowings",
        help="run the pipeline with and without borrowed slots and diff the trees",
    )
    _add_io_flags(p, cognacy_only=True)
    p.add_argument("--svg", action="store_true", help="also render SVG drawings")
    p.set_defaults(func=cmd_compare_borrowings)

    p = sub.add_parser("calibrate", help="map swadesh distances to ages")
    p.add_argument("distances", nargs="*", type=float, help="distances to tabulate")
    p.add_argument("--lambda", dest="rate", type=float, default=decay.DEFAULT_RATE,
                   help="replacement rate per millennium (default 0.14)")
    p.add_argument("--alpha", type=float, default=1.0, help="aging exponent")
    p.add_argument("--t0", type=float, default=1.0,
                   help="anchor age for the refit line (thousands of years)")
    p.add_argument("--shift", type=float, default=decay.DEFAULT_SHIFT,
                   help="borrowing-exclusion shift in swadesh units")
    p.add_argument("--l-max", type=float, default=200.0, help="curve grid maximum")
    p.add_argument("--step", type=float, default=1.0, help="curve grid step")
    p.add_argument("--out-dir", required=True, help="directory for output files")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("simulate", help="simulate cognacy data and test recovery")
    p.add_argument("--input", required=True, help="simulation config JSON")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out-dir", required=True, help="directory for output files")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="render a saved tree description to SVG")
    p.add_argument("--input", required=True, help="tree description JSON")
    p.add_argument("--out-dir", required=True, help="directory for output files")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputFormatError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IsolectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
