"""Command line front end.

Every subcommand resolves one ExperimentConfig (defaults, then config
file, then the WORKBENCH_SEED environment variable, then flags), runs a
deterministic experiment, writes a CSV report plus a JSON summary that
echoes the resolved configuration, and renders a PNG figure next to
them unless figures are disabled.

Exit codes: 0 success, 1 usage or malformed input, 2 violated
invariant, 3 exhausted precision or resource budget.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import figures, rng
from .averaging import (
    boundary_letter_observable,
    ergodicity_diagnostic,
    indicator_symbol_observable,
)
from .config import (
    ExperimentConfig,
    build_labeler,
    config_echo,
    effective_depth,
    probability_vector,
    resolve_config,
    _PARSERS,
)
from .entropy import (
    closed_form_target,
    cocycle_entropy_sweep,
    smb_trajectory,
)
from .errors import (
    InvariantViolation,
    PrecisionError,
    ResourceLimitError,
    StructureError,
    UsageError,
)
from .hyperfinite import (
    FiniteRelationModel,
    chain_sf,
    covering,
    cyclic_automorphism,
    folner_defect,
    interior_fraction,
    make_odometer_model,
    make_tail_model,
)
from .subadditive import (
    cardinality_functional,
    coordinate_block_relation,
    entropy_functional,
    subadditive_limit_harness,
)

LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# output helpers


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise InvariantViolation("CSV row width does not match the header")
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _write_json(path: str, payload: dict) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return path


def _summary_base(name: str, cfg: ExperimentConfig) -> dict:
    return {"subcommand": name, "config": config_echo(cfg)}


def _display(value: float, cfg: ExperimentConfig) -> str:
    """Entropy-like stdout values honor --bits; files always stay in nats."""
    if cfg.bits:
        return f"{value / LOG2:.6f} bits"
    return f"{value:.6f} nats"


def _out(cfg: ExperimentConfig, stem: str, ext: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, f"{stem}.{ext}")


def _build_model(cfg: ExperimentConfig) -> FiniteRelationModel:
    if cfg.model == "tail":
        return make_tail_model(cfg.rank, cfg.level_count)
    return make_odometer_model(cfg.level_count)


def _automorphisms(model: FiniteRelationModel, orders: Sequence[int]):
    try:
        return [cyclic_automorphism(model, k) for k in sorted(set(orders))]
    except StructureError as exc:
        raise UsageError(f"bad value for key d_orders: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands


def _cmd_smb_run(cfg: ExperimentConfig) -> int:
    labeler = build_labeler(cfg)
    p = probability_vector(cfg)
    depth = effective_depth(cfg, labeler)
    trajectories = []
    for s in range(cfg.starts):
        trajectories.append(
            smb_trajectory(
                x_seed=rng.derive_seed(cfg.seed, "smb-x", s),
                xi_seed=rng.derive_seed(cfg.seed, "smb-xi", s),
                labeler=labeler,
                p=p,
                rank=cfg.rank,
                n_max=cfg.n_max,
                mode=cfg.mode if cfg.mode != "auto" else "exact",
                depth=depth,
                mc_samples=cfg.mc_samples,
            )
        )
    header = [
        "n", "class_size", "info_nats", "info_norm", "stderr", "unresolved",
        "seed_x", "seed_xi", "mode", "estimator",
    ]
    rows = []
    for traj in trajectories:
        for r in traj.rows:
            rows.append([
                r.n, r.class_size, r.info_nats, r.info_norm, r.stderr,
                r.unresolved, traj.x_seed, traj.xi_seed, traj.mode, traj.estimator,
            ])
    csv_path = _write_csv(_out(cfg, "smb_run", "csv"), header, rows)
    target = trajectories[0].target
    endpoints = [t.endpoint().info_norm for t in trajectories]
    summary = _summary_base("smb-run", cfg)
    summary["target"] = target
    summary["endpoints"] = endpoints
    summary["rows"] = [dict(zip(header, row)) for row in rows]
    json_path = _write_json(_out(cfg, "smb_run", "json"), summary)
    print(f"smb-run: {cfg.starts} trajectories, n <= {cfg.n_max}, partition {labeler.descriptor}")
    for t in trajectories:
        print(f"  endpoint {_display(t.endpoint().info_norm, cfg)} (seed_x={t.x_seed})")
    if target is not None:
        print(f"  closed-form target {_display(target, cfg)}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if cfg.figures:
        fig_path = figures.smb_figure(trajectories, target, _out(cfg, "smb_run", "png"))
        print(f"wrote {fig_path}")
    return 0


def _cmd_entropy_sweep(cfg: ExperimentConfig) -> int:
    labeler = build_labeler(cfg)
    p = probability_vector(cfg)
    rows = cocycle_entropy_sweep(
        labeler,
        p,
        cfg.rank,
        range(cfg.n_max + 1),
        cfg.samples_per_n,
        mode=cfg.mode,
        seed=cfg.seed,
        depth=cfg.depth if cfg.depth else None,
        m_samples=cfg.m_samples,
    )
    header = ["n", "class_size", "h_norm", "stderr", "n_samples", "estimator", "unresolved_atoms"]
    table = [
        [r.n, r.class_size, r.h_norm, r.stderr, r.n_samples, r.estimator, r.unresolved_atoms]
        for r in rows
    ]
    csv_path = _write_csv(_out(cfg, "entropy_sweep", "csv"), header, table)
    target = closed_form_target(labeler, p)
    summary = _summary_base("entropy-sweep", cfg)
    summary["target"] = target
    summary["final_h_norm"] = rows[-1].h_norm
    summary["rows"] = [dict(zip(header, row)) for row in table]
    json_path = _write_json(_out(cfg, "entropy_sweep", "json"), summary)
    print(f"entropy-sweep: partition {labeler.descriptor}, n <= {cfg.n_max}, "
          f"{cfg.samples_per_n} boundary samples per level")
    print(f"  final normalized H {_display(rows[-1].h_norm, cfg)} [{rows[-1].estimator}]")
    if target is not None:
        print(f"  closed-form target {_display(target, cfg)}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if cfg.figures:
        fig_path = figures.sweep_figure(rows, target, _out(cfg, "entropy_sweep", "png"))
        print(f"wrote {fig_path}")
    return 0


def _cmd_covering_demo(cfg: ExperimentConfig) -> int:
    model = _build_model(cfg)
    autos = _automorphisms(model, cfg.d_orders)
    n_star = max(max(cfg.d_orders), 1)
    if n_star > cfg.level_count:
        raise UsageError("bad value for key d_orders: order exceeds level_count")
    m_required = 1.0 + (1.0 - cfg.delta) * len(autos) / cfg.delta**2
    m_stages = cfg.m_stages if cfg.m_stages else math.ceil(m_required)
    levels = [[n_star] for _ in range(m_stages)]
    b_arrays = []
    for i in range(m_stages):
        key = rng.derive_seed(cfg.seed, "cov-stage", i)
        centers = frozenset(y for y in model.points if rng.mix64(key, y) % 4 != 0)
        if not centers:
            centers = frozenset(model.points)
        b_arrays.append([centers])
    base_point = model.points[0]
    report = covering(model, levels, b_arrays, autos, cfg.delta, base_point)

    stage_masses = [
        sum(len(model.members(c)) for c in stage) for stage in report.per_stage
    ]
    header = ["stage", "level", "classes_selected", "stage_mass"]
    table = [
        [i + 1, levels[i][0], len(report.per_stage[i]), stage_masses[i]]
        for i in range(m_stages)
    ]
    csv_path = _write_csv(_out(cfg, "covering_demo", "csv"), header, table)
    summary = _summary_base("covering-demo", cfg)
    summary.update(
        {
            "ground_points": len(model.points),
            "mass": report.mass,
            "min_term": report.min_term,
            "rhs": report.rhs,
            "m_stages": report.m_stages,
            "m_required": report.m_required,
            "m_ok": report.m_ok,
            "hypothesis_ok": report.hypothesis_ok,
            "conclusion_holds": report.conclusion_holds,
            "rows": [dict(zip(header, row)) for row in table],
        }
    )
    json_path = _write_json(_out(cfg, "covering_demo", "json"), summary)
    print(f"covering-demo: {m_stages} stages on the {cfg.model} model "
          f"(N={len(model.points)}), delta={cfg.delta}, |D|={len(autos)}")
    print(f"  hypothesis audit: {'ok' if report.hypothesis_ok else 'FAILED'}")
    print(f"  selected mass {report.mass} vs required {report.rhs:.3f} "
          f"((1-delta) * min term {report.min_term})")
    print(f"  conclusion holds: {report.conclusion_holds}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if cfg.figures:
        fig_path = figures.covering_figure(stage_masses, report.rhs, _out(cfg, "covering_demo", "png"))
        print(f"wrote {fig_path}")
    return 0


def _cmd_folner_report(cfg: ExperimentConfig) -> int:
    model = _build_model(cfg)
    autos = _automorphisms(model, cfg.d_orders)
    k_max = max(cfg.d_orders)
    orbit_sf = chain_sf(model, k_max)
    header = ["n", "class_size", "defect", "defect_exact", "interior", "interior_exact"]
    table = []
    fig_rows = []
    for n in range(cfg.level_count + 1):
        defect = folner_defect(model, autos, n)
        _, interior = interior_fraction(model, orbit_sf, n)
        table.append([
            n, model.class_size(n), float(defect), str(defect), float(interior), str(interior),
        ])
        fig_rows.append((n, defect, interior))
    csv_path = _write_csv(_out(cfg, "folner_report", "csv"), header, table)
    summary = _summary_base("folner-report", cfg)
    summary["automorphism_orders"] = sorted(set(cfg.d_orders))
    summary["zero_defect_levels"] = [row[0] for row in table if row[3] == "0"]
    summary["rows"] = [dict(zip(header, row)) for row in table]
    json_path = _write_json(_out(cfg, "folner_report", "json"), summary)
    print(f"folner-report: {cfg.model} model, L={cfg.level_count}, "
          f"automorphism orders {sorted(set(cfg.d_orders))}")
    for row in table:
        print(f"  n={row[0]}: defect {row[3]}, interior fraction {row[5]}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if cfg.figures:
        fig_path = figures.folner_figure(fig_rows, _out(cfg, "folner_report", "png"))
        print(f"wrote {fig_path}")
    return 0


def _parse_observable(cfg: ExperimentConfig):
    kind, _, arg = cfg.observable.partition(":")
    try:
        if kind == "indicator":
            symbol = int(arg) if arg else 0
            if not 0 <= symbol < len(cfg.p):
                raise UsageError("bad value for key observable: symbol out of alphabet")
            return indicator_symbol_observable(cfg.rank, symbol)
        if kind == "letter":
            position = int(arg) if arg else 1
            if position < 1:
                raise UsageError("bad value for key observable: positions are 1-based")
            return boundary_letter_observable(cfg.rank, position)
    except ValueError as exc:
        raise UsageError(f"bad value for key observable: {exc}") from exc
    raise UsageError(
        f"bad value for key observable: {cfg.observable!r} (use indicator:<symbol> "
        "or letter:<position>)"
    )


def _cmd_ergodic_avg(cfg: ExperimentConfig) -> int:
    f = _parse_observable(cfg)
    p = probability_vector(cfg)
    if cfg.starts < 2:
        raise UsageError("bad value for key starts: spread needs at least 2")
    report = ergodicity_diagnostic(
        f, cfg.starts, cfg.n_max, cfg.rank, p, cfg.seed,
        depth=cfg.depth if cfg.depth else None,
    )
    header = ["n", "class_size", "mean", "spread"]
    table = [[r.n, r.class_size, r.mean, r.spread] for r in report.rows]
    csv_path = _write_csv(_out(cfg, "ergodic_avg", "csv"), header, table)
    summary = _summary_base("ergodic-avg", cfg)
    summary["observable"] = f.name
    summary["flagged_non_decaying"] = report.flagged_non_decaying
    summary["final_spread"] = report.rows[-1].spread
    summary["rows"] = [dict(zip(header, row)) for row in table]
    json_path = _write_json(_out(cfg, "ergodic_avg", "json"), summary)
    print(f"ergodic-avg: observable {f.name}, {cfg.starts} starts, n <= {cfg.n_max}")
    print(f"  final spread {report.rows[-1].spread:.6g}"
          f" (first positive {next((r.spread for r in report.rows if r.spread > 0), 0.0):.6g})")
    print(f"  non-decaying spread flagged: {report.flagged_non_decaying}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if cfg.figures:
        fig_path = figures.spread_figure(report, _out(cfg, "ergodic_avg", "png"))
        print(f"wrote {fig_path}")
    return 0


def _cmd_subadditive_sweep(cfg: ExperimentConfig) -> int:
    model = _build_model(cfg)
    if cfg.functional == "hP":
        if cfg.model != "tail":
            raise UsageError("bad value for key functional: hP needs the tail model")
        labeler = build_labeler(cfg)
        functional = entropy_functional(
            model, labeler, probability_vector(cfg),
            mode=cfg.mode if cfg.mode != "exact" else "auto",
            m_samples=cfg.m_samples, seed=cfg.seed,
        )
    elif cfg.functional == "cardinality":
        functional = cardinality_functional()
    else:
        raise UsageError(
            f"bad value for key functional: {cfg.functional!r} (use hP or cardinality)"
        )
    offchain = 1 if cfg.level_count >= 2 else 0
    candidates = [
        (f"offchain-{offchain}", coordinate_block_relation(model, [offchain])),
    ]
    report = subadditive_limit_harness(
        functional, model, range(cfg.level_count + 1), candidates
    )
    header = ["n", "s_n", "stderr", "estimator", "gap"]
    table = [[r.n, r.s_n, r.stderr, r.estimator, r.gap] for r in report.rows]
    csv_path = _write_csv(_out(cfg, "subadditive_sweep", "csv"), header, table)
    summary = _summary_base("subadditive-sweep", cfg)
    summary["functional"] = functional.name
    summary["infimum"] = report.infimum
    summary["infimum_source"] = report.infimum_source
    summary["monotone_within_noise"] = report.monotone_within_noise
    summary["rows"] = [dict(zip(header, row)) for row in table]
    json_path = _write_json(_out(cfg, "subadditive_sweep", "json"), summary)
    print(f"subadditive-sweep: functional {functional.name} on the {cfg.model} model, "
          f"L={cfg.level_count}")
    print(f"  infimum {_display(report.infimum, cfg)} from {report.infimum_source}")
    print(f"  monotone within noise: {report.monotone_within_noise}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if cfg.figures:
        fig_path = figures.subadditive_figure(report, _out(cfg, "subadditive_sweep", "png"))
        print(f"wrote {fig_path}")
    return 0


# ---------------------------------------------------------------------------
# selftest


def _selftest_checks():
    """Yield (name, callable) pairs; each callable raises on failure."""
    import random as _random

    from .boundary import (
        BoundaryPrefix,
        act,
        cylinder_fraction,
        fundamental_cocycle,
        radon_nikodym_log,
        sample_prefix,
        tail_class,
    )
    from .averaging import class_average
    from .entropy import entropy_function_hP, information_function, shannon
    from .hyperfinite import (
        count_disjoint_subcollections,
        counting_bound,
        disjointify,
        stirling_bound_E,
    )
    from .shifts import ProbabilityVector, bernoulli_point, symbol_partition, uniform_vector
    from .words import enumerate_ball, enumerate_sphere, multiply, reduce_codes, sphere_size

    def check_word_algebra():
        rand = _random.Random(0)
        pool = enumerate_ball(4, 2)
        for _ in range(200):
            u, v = rand.choice(pool), rand.choice(pool)
            got = multiply(u, v)
            want = reduce_codes(u.codes + v.codes, 2)
            assert got.codes == want.codes, (u, v)

    def check_sphere_sizes():
        for r in (2, 3):
            for n in range(5):
                assert len(enumerate_sphere(n, r)) == sphere_size(n, r)

    def check_cylinder_sum():
        total = Fraction(0)
        for xi in (BoundaryPrefix(bytes(c), 2) for c in _admissible_strings(3, 2)):
            total += cylinder_fraction(xi.depth, 2)
        assert total == 1, total

    def check_rn_chain_rule():
        rand = _random.Random(1)
        pool = enumerate_ball(3, 2)
        for t in range(200):
            g, h = rand.choice(pool), rand.choice(pool)
            xi = sample_prefix(10, 2, rng.derive_seed(7, "selftest-rn", t))
            lhs = radon_nikodym_log(multiply(g, h), xi)
            hxi, _ = act(h, xi)
            rhs = radon_nikodym_log(h, xi) + radon_nikodym_log(g, hxi)
            assert abs(lhs - rhs) < 1e-12, (g, h)

    def check_cocycle_transport():
        xi = sample_prefix(8, 2, 99)
        for k in range(3):
            for eta in tail_class(xi, k):
                g = fundamental_cocycle(eta, xi, k)
                out, _ = act(g, xi) if len(g) else (xi, 0)
                assert out.codes[: out.depth] == eta.codes[: out.depth]

    def check_uniform_information():
        p = uniform_vector(2)
        x = bernoulli_point(5, 2, p)
        xi = sample_prefix(8, 2, 6)
        for n in range(4):
            j = information_function(x, xi, n, symbol_partition(2, 2))
            assert abs(j.value / 3**n - math.log(2.0)) < 1e-12

    def check_hp_symbol_exact():
        p = ProbabilityVector((0.8, 0.2))
        xi = sample_prefix(8, 2, 11)
        est = entropy_function_hP(xi, 3, symbol_partition(2, 2), p)
        assert est.estimator == "exact"
        assert abs(est.value - 27 * shannon((0.8, 0.2))) < 1e-12

    def check_odometer_average():
        model = make_odometer_model(6)
        f = lambda y: 1 if y[0] == 0 else 0
        for k in (1, 3, 6):
            avg = class_average(f, model.points[0], k, model=model)
            assert avg == Fraction(1, 2), (k, avg)

    def check_folner_zero_iff():
        model = make_tail_model(2, 3)
        for order in (1, 2):
            autos = [cyclic_automorphism(model, order)]
            for n in range(4):
                defect = folner_defect(model, autos, n)
                assert (defect == 0) == (n >= order), (order, n, defect)

    def check_stirling_values():
        assert abs(stirling_bound_E(2) - math.log(2.0)) < 1e-15
        vals = [stirling_bound_E(l) for l in range(2, 13)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert counting_bound(4, 10) == 2.0 ** (5.0 * stirling_bound_E(2) * 10)

    def check_disjointify_idempotent():
        model = make_tail_model(2, 4)
        rand = _random.Random(3)
        pairs = [(rand.choice(model.points), rand.randint(0, 4)) for _ in range(30)]
        sel = disjointify(pairs, model)
        again = disjointify(((model.members(c)[0], c.level) for c in sel), model)
        assert set(sel) == set(again)
        covered: set[bytes] = set()
        for c in sel:
            ms = set(model.members(c))
            assert not (covered & ms)
            covered |= ms

    def check_covering_small():
        model = make_tail_model(2, 3)
        autos = [cyclic_automorphism(model, 1)]
        m = math.ceil(1.0 + 0.9 / 0.01)
        levels = [[1]] * m
        b_arrays = [[frozenset(model.points)]] * m
        report = covering(model, levels, b_arrays, autos, 0.1, model.points[0])
        assert report.hypothesis_ok and report.conclusion_holds

    def check_count_subcollections():
        model = make_odometer_model(4)
        got = count_disjoint_subcollections(model, model.points[0], 2, [1, 2], 2)
        # candidates inside a 4-point class: the class itself and its two
        # halves; legal collections: empty, each single, the two halves
        assert got == 5, got

    def check_seed_derivation():
        a = rng.derive_seed(1729, "path", 0)
        b = rng.derive_seed(1729, "path", 0)
        c = rng.derive_seed(1729, "path", 1)
        assert a == b and a != c

    return [
        ("word algebra vs stack reduction", check_word_algebra),
        ("sphere sizes", check_sphere_sizes),
        ("cylinder masses sum to one", check_cylinder_sum),
        ("radon-nikodym chain rule", check_rn_chain_rule),
        ("return words transport tail classes", check_cocycle_transport),
        ("uniform-alphabet information is exactly log 2 per key", check_uniform_information),
        ("symbol-partition entropy is exactly |class| H(p)", check_hp_symbol_exact),
        ("odometer class averages are exactly 1/2", check_odometer_average),
        ("folner defect vanishes exactly at the order", check_folner_zero_iff),
        ("stirling bound values and monotonicity", check_stirling_values),
        ("disjointify is idempotent and disjoint", check_disjointify_idempotent),
        ("small covering instance", check_covering_small),
        ("seed derivation is stable and splitting", check_seed_derivation),
        ("disjoint subcollection count on the odometer", check_count_subcollections),
    ]


def _admissible_strings(length: int, rank: int):
    limit = 2 * rank
    out = [b""]
    for _ in range(length):
        out = [s + bytes([c]) for s in out for c in range(limit) if not s or c != s[-1] ^ 1]
    return out


def _cmd_selftest(cfg: ExperimentConfig) -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            check()
        except Exception as exc:  # noqa: BLE001  (report and continue)
            failures += 1
            print(f"FAIL - {name}: {exc!r}")
        else:
            print(f"ok - {name}")
    if failures:
        print(f"selftest: {failures} failing check(s)")
        return 2
    print("selftest: all checks passed")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


_COMMANDS = {
    "smb-run": _cmd_smb_run,
    "entropy-sweep": _cmd_entropy_sweep,
    "covering-demo": _cmd_covering_demo,
    "folner-report": _cmd_folner_report,
    "ergodic-avg": _cmd_ergodic_avg,
    "subadditive-sweep": _cmd_subadditive_sweep,
    "selftest": _cmd_selftest,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102  (argparse hook)
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="workbench", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", metavar="PATH", help="key=value config file")
        for key in _PARSERS:
            if key in ("bits", "figures"):
                continue
            p.add_argument(
                f"--{key.replace('_', '-')}",
                dest=f"opt_{key}",
                metavar="V",
                help=f"override config key {key}",
            )
        p.add_argument("--bits", action="store_true",
                       help="display entropies in bits (files stay in nats)")
        p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")
    return parser


def run_subcommand(argv: Sequence[str]) -> int:
    """Parse argv (without the program name) and run one subcommand.

    Returns the process exit code instead of raising, so both main()
    and the tests share the same error mapping.
    """
    try:
        parser = _build_parser()
        args = parser.parse_args(list(argv))
        if args.subcommand is None:
            raise UsageError("a subcommand is required (try: workbench selftest)")
        file_text = None
        if args.config is not None:
            try:
                with open(args.config, "r", encoding="utf-8") as fh:
                    file_text = fh.read()
            except OSError as exc:
                raise UsageError(f"cannot read config file: {exc}") from exc
        overrides = {}
        for key in _PARSERS:
            if key in ("bits", "figures"):
                continue
            value = getattr(args, f"opt_{key}", None)
            if value is not None:
                overrides[key] = value
        if args.bits:
            overrides["bits"] = "true"
        if args.no_figures:
            overrides["figures"] = "false"
        cfg = resolve_config(file_text, overrides)
        return _COMMANDS[args.subcommand](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except StructureError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (PrecisionError, ResourceLimitError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3


def main(argv: Sequence[str] | None = None) -> int:
    return run_subcommand(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
