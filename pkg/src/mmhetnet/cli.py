"""Batch front-end: read a network config and an experiment list, write one CSV per experiment.

Config document (YAML or JSON), every key optional::

    density_unit: per_500m_disc      # or per_m2
    tiers:
      - {tx_power_dbm: 43, density: 5, bias: 1, blockage: 0.006}
      - {tx_power_dbm: 33, density: 10, bias: 1, blockage: 0.024}
    channel: {alpha_los: 2, alpha_nlos: 4, m_los: 3, m_nlos: 2, carrier_hz: 2.8e10}
    antenna: {elements: 64}          # or {main_gain, side_gain, beamwidth (rad)}
    noise: {noise_figure_db: 10}     # or {noise_power_dbm: -74}; null for SIR
    bandwidth_hz: 1.0e9
    user_density: 100                # same unit as tier densities
    seed: 20240

Experiment document::

    experiments:
      - kind: coverage               # association coverage variance meta delay jitter
                                     # rate montecarlo figure
        sweep: {parameter: theta_db, grid: [-10, 0, 10]}
        output: coverage.csv
        theta_db: 0                  # fixed threshold when the sweep is over something else
        mc: {n_geometry: 10000, n_fading: 500, base_seed: 1}

Sweep parameters are ``theta_db``, ``rate_mbps``, or a dotted path into the
config document such as ``tiers.1.bias`` (tiers counted from 0).
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from mmhetnet import association, coverage, delay, moments, montecarlo, rate
from mmhetnet.laplace import DEFAULT_ORDER, GridOrder
from mmhetnet.model import (DISC_500M, LINK_STATES, AntennaPattern, ChannelModel, NetworkConfig, TierParams,
                            antenna_from_elements, dbm_to_watts, kappa_from_carrier, thermal_noise, validate)
from mmhetnet.specialfn import NonConvergenceError, QuadratureSpec

DEFAULT_SEED = 20240
EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERIC = 2, 3, 4
KINDS = ("association", "coverage", "variance", "meta", "delay", "jitter", "rate", "montecarlo", "figure")
FIGURES = ("fig2", "fig8")

DEFAULT_DOCUMENT: dict[str, Any] = {
    "density_unit": "per_500m_disc",
    "tiers": [
        {"tx_power_dbm": 43.0, "density": 5.0, "bias": 1.0, "blockage": 0.006},
        {"tx_power_dbm": 33.0, "density": 10.0, "bias": 1.0, "blockage": 0.024},
    ],
    "channel": {"alpha_los": 2.0, "alpha_nlos": 4.0, "m_los": 3, "m_nlos": 2, "carrier_hz": 28e9},
    "antenna": {"elements": 64},
    "noise": {"noise_figure_db": 10.0},
    "bandwidth_hz": 1e9,
    "user_density": 100.0,
    "seed": DEFAULT_SEED,
}


class CliError(Exception):
    def __init__(self, code: int, kind: str, problems):
        super().__init__("; ".join(problems))
        self.code = code
        self.kind = kind
        self.problems = list(problems)


def _parse_error(msg: str) -> CliError:
    return CliError(EXIT_PARSE, "parse", [msg])


def _validation_error(problems) -> CliError:
    return CliError(EXIT_VALIDATION, "validation", problems)


# --- documents ------------------------------------------------------------------------------------

def load_document(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _parse_error(f"cannot read {path}: {exc.strerror}") from None
    try:
        if path.endswith(".json"):
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise _parse_error(f"{path}: {exc}") from None


def merge_defaults(doc: dict | None) -> dict:
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise _parse_error("config must be a mapping")
    out = copy.deepcopy(DEFAULT_DOCUMENT)
    for key, value in doc.items():
        if key not in out:
            raise _validation_error([f"unknown config key {key!r}"])
        if key == "tiers":
            if not isinstance(value, list):
                raise _parse_error("tiers must be a list")
            tiers = []
            for i, t in enumerate(value):
                if not isinstance(t, dict):
                    raise _parse_error(f"tiers[{i}] must be a mapping")
                base = {"tx_power_dbm": None, "density": None, "bias": 1.0, "blockage": 0.006}
                for tk in t:
                    if tk not in base:
                        raise _validation_error([f"unknown tier key {tk!r}"])
                base.update(t)
                tiers.append(base)
            out["tiers"] = tiers
        elif key in ("channel", "antenna", "noise") and value is not None:
            if not isinstance(value, dict):
                raise _parse_error(f"{key} must be a mapping")
            if key == "channel":
                out[key].update(value)
            else:
                out[key] = dict(value)
        else:
            out[key] = value
    return out


def _as_number(value) -> float | None:
    # YAML 1.1 reads exponents without a sign ("2.8e10") as strings
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


def _num(value, what: str) -> float:
    x = _as_number(value)
    if x is None:
        raise _parse_error(f"{what} must be a number")
    return x


def build_config(doc: dict) -> NetworkConfig:
    """NetworkConfig from a defaults-merged document; raises CliError on bad input."""
    unit = doc["density_unit"]
    if unit not in ("per_500m_disc", "per_m2"):
        raise _validation_error([f"density_unit must be per_500m_disc or per_m2, not {unit!r}"])
    scale = 1.0 / DISC_500M if unit == "per_500m_disc" else 1.0
    tiers = []
    for i, t in enumerate(doc["tiers"]):
        if t.get("tx_power_dbm") is None or t.get("density") is None:
            raise _validation_error([f"tier {i + 1}: tx_power_dbm and density are required"])
        tiers.append(TierParams(dbm_to_watts(_num(t["tx_power_dbm"], "tx_power_dbm")),
                                _num(t["density"], "density") * scale,
                                _num(t["bias"], "bias"), _num(t["blockage"], "blockage")))
    ch = dict(doc["channel"])
    known = {"alpha_los", "alpha_nlos", "m_los", "m_nlos", "carrier_hz", "kappa_los", "kappa_nlos"}
    extra = set(ch) - known
    if extra:
        raise _validation_error([f"unknown channel key {sorted(extra)[0]!r}"])
    kappa = kappa_from_carrier(_num(ch.get("carrier_hz", 28e9), "carrier_hz"))
    for name in ("m_los", "m_nlos"):
        if isinstance(ch[name], float) and not ch[name].is_integer():
            raise _validation_error([f"Nakagami shape {name} must be an integer"])
    channel = ChannelModel(_num(ch["alpha_los"], "alpha_los"), _num(ch["alpha_nlos"], "alpha_nlos"),
                           _num(ch.get("kappa_los", kappa), "kappa_los"), _num(ch.get("kappa_nlos", kappa), "kappa_nlos"),
                           int(_num(ch["m_los"], "m_los")), int(_num(ch["m_nlos"], "m_nlos")))
    ant = doc["antenna"]
    if "elements" in ant:
        n = _num(ant["elements"], "antenna.elements")
        if n < 1 or not n.is_integer():
            raise _validation_error(["antenna.elements must be a positive integer"])
        antenna = antenna_from_elements(int(n))
    else:
        try:
            antenna = AntennaPattern(_num(ant["main_gain"], "main_gain"), _num(ant["side_gain"], "side_gain"),
                                     _num(ant["beamwidth"], "beamwidth"))
        except KeyError as exc:
            raise _validation_error([f"antenna needs elements or main_gain/side_gain/beamwidth; missing {exc}"]) from None
    bandwidth = _num(doc["bandwidth_hz"], "bandwidth_hz")
    noise_doc = doc["noise"]
    if noise_doc is None:
        noise = 0.0
    elif "noise_power_dbm" in noise_doc:
        noise = dbm_to_watts(_num(noise_doc["noise_power_dbm"], "noise_power_dbm"))
    else:
        if bandwidth <= 0:
            raise _validation_error(["bandwidth must be positive"])
        noise = thermal_noise(bandwidth, _num(noise_doc.get("noise_figure_db", 0.0), "noise_figure_db"))
    config = NetworkConfig(tuple(tiers), channel, antenna, noise, bandwidth,
                           _num(doc["user_density"], "user_density") * scale)
    problems = validate(config)
    if problems:
        raise _validation_error(problems)
    return config


def set_path(doc: dict, path: str, value) -> dict:
    """Copy of ``doc`` with the dotted ``path`` replaced; the path must already exist."""
    out = copy.deepcopy(doc)
    node = out
    parts = path.split(".")
    for i, part in enumerate(parts):
        last = i == len(parts) - 1
        if isinstance(node, list):
            if not part.isdigit() or int(part) >= len(node):
                raise _validation_error([f"parameter path {path!r} does not name a config field"])
            key = int(part)
        elif isinstance(node, dict):
            if part not in node:
                raise _validation_error([f"parameter path {path!r} does not name a config field"])
            key = part
        else:
            raise _validation_error([f"parameter path {path!r} does not name a config field"])
        if last:
            if isinstance(node[key], (dict, list)):
                raise _validation_error([f"parameter path {path!r} names a section, not a field"])
            node[key] = value
        else:
            node = node[key]
    return out


# --- experiments ----------------------------------------------------------------------------------

@dataclass
class McSpec:
    n_geometry: int = 10_000
    n_fading: int = montecarlo.DEFAULT_N_FADING
    base_seed: int | None = None


@dataclass
class ExperimentSpec:
    kind: str
    parameter: str | None
    grid: list
    output: str
    name: str | None = None
    options: dict = field(default_factory=dict)
    mc: McSpec | None = None


PSEUDO_PARAMETERS = ("theta_db", "rate_mbps")


def parse_experiments(doc, base_doc: dict) -> list[ExperimentSpec]:
    if not isinstance(doc, dict) or not isinstance(doc.get("experiments"), list):
        raise _parse_error("experiment file must contain an 'experiments' list")
    specs = []
    problems = []
    for i, e in enumerate(doc["experiments"]):
        if not isinstance(e, dict):
            raise _parse_error(f"experiments[{i}] must be a mapping")
        kind = e.get("kind")
        if kind not in KINDS:
            problems.append(f"experiments[{i}]: kind must be one of {', '.join(KINDS)}")
            continue
        sweep = e.get("sweep") or {}
        if not isinstance(sweep, dict):
            raise _parse_error(f"experiments[{i}].sweep must be a mapping")
        parameter = sweep.get("parameter")
        grid = sweep.get("grid", [])
        if kind == "figure":
            name = e.get("name")
            if name not in FIGURES:
                problems.append(f"experiments[{i}]: figure name must be one of {', '.join(FIGURES)}")
                continue
        else:
            name = e.get("name")
            if not isinstance(grid, list) or not grid:
                problems.append(f"experiments[{i}]: sweep grid nonempty")
                continue
            if any(_as_number(g) is None for g in grid):
                raise _parse_error(f"experiments[{i}]: sweep grid must hold numbers")
            grid = [g if isinstance(g, (int, float)) else _as_number(g) for g in grid]
            if parameter is None:
                problems.append(f"experiments[{i}]: sweep parameter is required")
                continue
            if parameter not in PSEUDO_PARAMETERS:
                try:
                    set_path(base_doc, parameter, grid[0])
                except CliError as exc:
                    problems.extend(f"experiments[{i}]: {p}" for p in exc.problems)
                    continue
        output = e.get("output") or f"{name or kind}_{i}.csv"
        if os.path.isabs(output) or ".." in output.split("/"):
            problems.append(f"experiments[{i}]: output must be a relative file name")
            continue
        mc = None
        if "mc" in e or kind in ("montecarlo", "figure"):
            m = e.get("mc") or {}
            mc = McSpec(int(m.get("n_geometry", 10_000)), int(m.get("n_fading", montecarlo.DEFAULT_N_FADING)),
                        m.get("base_seed"))
            if mc.n_geometry < 1 or mc.n_fading < 1:
                problems.append(f"experiments[{i}]: mc sizes must be positive")
                continue
        options = {k: v for k, v in e.items() if k not in ("kind", "sweep", "output", "name", "mc")}
        specs.append(ExperimentSpec(kind, parameter, list(grid), output, name, options, mc))
    if problems:
        raise _validation_error(problems)
    return specs


# --- evaluation -----------------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(round(x, 12))


class CsvSink:
    """Writes rows as they are produced so a failure still leaves the completed part on disk."""

    def __init__(self, path: str, header: list[str]):
        self.path = path
        self.fh = open(path, "w", newline="", encoding="utf-8")
        self.writer = csv.writer(self.fh, lineterminator="\r\n")
        self.writer.writerow(header)

    def row(self, values) -> None:
        self.writer.writerow([_fmt(v) for v in values])
        self.fh.flush()

    def close(self) -> None:
        self.fh.close()


STATE_LABEL = {LINK_STATES[0]: "los", LINK_STATES[1]: "nlos"}


def _links(config: NetworkConfig):
    return [(k, s) for k in range(config.n_tiers) for s in LINK_STATES]


@dataclass
class RunContext:
    base_doc: dict
    out_dir: str
    seed: int
    threads: int
    quad: QuadratureSpec
    order: GridOrder


def _point(ctx: RunContext, spec: ExperimentSpec, value):
    """(config, theta, rate) for one sweep point."""
    doc = ctx.base_doc
    theta_db = float(spec.options.get("theta_db", 0.0))
    rate_mbps = float(spec.options.get("rate_mbps", 100.0))
    if spec.parameter == "theta_db":
        theta_db = float(value)
    elif spec.parameter == "rate_mbps":
        rate_mbps = float(value)
    elif spec.parameter is not None:
        doc = set_path(doc, spec.parameter, value)
    return build_config(doc), 10.0 ** (theta_db / 10.0), rate_mbps * 1e6


def _label(state) -> str:
    return STATE_LABEL.get(state, state)


def _status(*xs) -> str:
    return "divergent" if any(delay.is_divergent(x) for x in xs) else "ok"


def run_experiment(ctx: RunContext, spec: ExperimentSpec) -> str:
    path = os.path.join(ctx.out_dir, spec.output)
    if spec.kind == "figure":
        return _run_figure(ctx, spec, path)
    param = spec.parameter
    seed = ctx.seed if spec.mc is None or spec.mc.base_seed is None else int(spec.mc.base_seed)
    headers = {
        "association": [param, "tier", "state", "association", "status"],
        "coverage": [param, "tier", "state", "success_prob", "status"],
        "variance": [param, "tier", "variance", "status"],
        "meta": [param, "y", "meta_beta", "meta_exact", "status"],
        "delay": [param, "tier", "state", "mean_local_delay", "second_neg_moment", "status"],
        "jitter": [param, "mean_local_delay", "jitter", "status"],
        "rate": [param, "tier", "state", "rate_moment", "status"],
        "montecarlo": [param, "tier", "state", "mc_mean", "mc_second_moment", "mc_variance", "n", "status"],
    }
    sink = CsvSink(path, headers[spec.kind])
    value = None
    try:
        for value in spec.grid:
            config, theta, rate_thr = _point(ctx, spec, value)
            _emit(ctx, spec, sink, value, config, theta, rate_thr, seed)
    except NonConvergenceError as exc:
        width = len(headers[spec.kind])
        sink.row([value] + [""] * (width - 2) + ["nonconverged"])
        sink.close()
        raise CliError(EXIT_NUMERIC, "nonconvergence", [f"{spec.output}: {exc}"]) from None
    sink.close()
    return path


def _emit(ctx, spec, sink, value, config, theta, rate_thr, seed):
    kind = spec.kind
    order = ctx.order
    if kind == "association":
        table = association.association_table(config, ctx.quad)
        for (k, s), a in table.items():
            sink.row([value, k + 1, _label(s), a, "ok"])
        sink.row([value, "all", "all", sum(table.values()), "ok"])
    elif kind == "coverage":
        table = coverage.success_table(config, theta, order)
        for (k, s) in _links(config):
            sink.row([value, k + 1, _label(s), table[(k, s)], "ok"])
        for k in range(config.n_tiers):
            sink.row([value, k + 1, "all", coverage.tier_success(config, k, theta, order), "ok"])
        sink.row([value, "all", "all", table["total"], "ok"])
    elif kind == "variance":
        for k in range(config.n_tiers):
            sink.row([value, k + 1, moments.tier_variance(config, k, theta, order), "ok"])
        sink.row([value, "all", moments.variance(config, theta, order), "ok"])
    elif kind == "meta":
        ys = spec.options.get("y", [round(0.05 * i, 2) for i in range(1, 20)])
        beta = np.atleast_1d(moments.meta_distribution_beta(config, theta, ys, order))
        exact = np.atleast_1d(moments.meta_distribution_exact(config, theta, ys, order))
        for y, b, e in zip(ys, beta, exact):
            sink.row([value, y, b, e, "ok"])
    elif kind == "delay":
        for (k, s) in _links(config):
            d1 = delay.mean_local_delay(config, k, s, theta, order=order)
            d2 = delay.second_negative_moment(config, k, s, theta, order=order)
            sink.row([value, k + 1, _label(s), "" if delay.is_divergent(d1) else d1,
                      "" if delay.is_divergent(d2) else d2, _status(d1, d2)])
    elif kind == "jitter":
        r = delay.delay_result(config, theta, order=order)
        d1 = "" if delay.is_divergent(r.mean_local_delay) else r.mean_local_delay
        jit = "" if delay.is_divergent(r.jitter) else r.jitter
        sink.row([value, d1, jit, _status(r.mean_local_delay, r.jitter)])
    elif kind == "rate":
        b = int(spec.options.get("b", 1))
        for (k, s) in _links(config):
            sink.row([value, k + 1, _label(s), rate.rate_moment(config, k, s, b, rate_thr, order=order), "ok"])
        sink.row([value, "all", "all", rate.rate_moment_total(config, b, rate_thr, order=order), "ok"])
    elif kind == "montecarlo":
        mc = spec.mc
        meta = montecarlo.run_meta(config, theta, mc.n_geometry, mc.n_fading, seed, threads=ctx.threads)
        groups = [((k, s), meta.subset(k, s)) for (k, s) in _links(config)] + [(("all", "all"), meta)]
        for (k, s), sub in groups:
            label_k = k + 1 if k != "all" else k
            if sub.n_geometry == 0:
                sink.row([value, label_k, _label(s), "", "", "", 0, "ok"])
                continue
            sink.row([value, label_k, _label(s), sub.mean, sub.second_moment, sub.variance, sub.n_geometry, "ok"])


def _run_figure(ctx: RunContext, spec: ExperimentSpec, path: str) -> str:
    mc = spec.mc or McSpec()
    seed = ctx.seed if mc.base_seed is None else int(mc.base_seed)
    config = build_config(ctx.base_doc)
    order = ctx.order
    if spec.name == "fig2":
        grid = spec.options.get("theta_db", [-10, -5, 0, 5, 10, 15, 20])
        sink = CsvSink(path, ["theta_db", "tier", "state", "analytic_sp", "mc_sp", "analytic_var", "mc_var", "status"])
        thetas = [10.0 ** (t / 10.0) for t in grid]
        metas = montecarlo.run_meta_sweep(config, thetas, mc.n_geometry, mc.n_fading, seed, threads=ctx.threads)
        for t_db, theta, meta in zip(grid, thetas, metas):
            ms = moments.moment_set(config, theta, (1, 2), order)
            for (k, s) in _links(config):
                sub = meta.subset(k, s)
                m1, m2 = ms.per_link[(k, s)][1], ms.per_link[(k, s)][2]
                sink.row([t_db, k + 1, _label(s), coverage.success_prob(config, k, s, theta, order),
                          sub.mean if sub.n_geometry else "", max(0.0, m2 - m1 * m1),
                          sub.variance if sub.n_geometry else "", "ok"])
            for k in range(config.n_tiers):
                sub = meta.subset(k)
                sink.row([t_db, k + 1, "all", coverage.tier_success(config, k, theta, order), sub.mean,
                          moments.tier_variance(config, k, theta, order), sub.variance, "ok"])
            sink.row([t_db, "all", "all", coverage.success_prob_total(config, theta, order), meta.mean,
                      ms.variance(), meta.variance, "ok"])
        sink.close()
        return path
    # fig8: meta distribution against y for several pico-tier blockage values
    betas = spec.options.get("beta2", [0.006, 0.024, 0.036])
    ys = spec.options.get("y", [round(0.05 * i, 2) for i in range(1, 20)])
    theta = 10.0 ** (float(spec.options.get("theta_db", 0.0)) / 10.0)
    sink = CsvSink(path, ["y", "beta2", "meta_beta", "meta_exact", "meta_mc", "status"])
    for b2 in betas:
        cfg = build_config(set_path(ctx.base_doc, "tiers.1.blockage", b2))
        beta = np.atleast_1d(moments.meta_distribution_beta(cfg, theta, ys, order))
        exact = np.atleast_1d(moments.meta_distribution_exact(cfg, theta, ys, order))
        meta = montecarlo.run_meta(cfg, theta, mc.n_geometry, mc.n_fading, seed, threads=ctx.threads)
        emp = meta.ccdf(ys)
        for y, b, e, m in zip(ys, beta, exact, emp):
            sink.row([y, b2, b, e, m, "ok"])
    sink.close()
    return path


# --- entry point ----------------------------------------------------------------------------------

def _order_for(tol: float) -> GridOrder:
    if tol <= 1e-10:
        return GridOrder(outer=14, inner=16)
    if tol >= 1e-5:
        return GridOrder(outer=8, inner=10)
    return DEFAULT_ORDER


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmhetnet", description="Analytic and simulated performance of K-tier mmWave networks.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="network config (YAML or JSON); built-in two-tier defaults if omitted")
        sp.add_argument("--out-dir", default=".", help="directory for CSV output")
        sp.add_argument("--seed", type=int, help=f"Monte Carlo base seed (default: config seed or {DEFAULT_SEED})")
        sp.add_argument("--threads", type=int, default=1, help="worker processes for Monte Carlo")
        sp.add_argument("--quad-tol", type=float, default=1e-8, help="relative quadrature tolerance")

    run = sub.add_parser("run", help="run the experiments listed in a file")
    common(run)
    run.add_argument("--experiment", required=True, help="experiment list (YAML or JSON)")
    fig = sub.add_parser("figure", help="emit the data behind a reference figure")
    fig.add_argument("name", choices=FIGURES)
    common(fig)
    fig.add_argument("--n-geometry", type=int, default=10_000)
    fig.add_argument("--n-fading", type=int, default=montecarlo.DEFAULT_N_FADING)
    return p


def _fail(err: CliError) -> int:
    sys.stderr.write(json.dumps({"error": err.kind, "exit_code": err.code, "problems": err.problems}) + "\n")
    return err.code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else 0
    try:
        if args.threads < 1:
            raise _validation_error(["--threads must be >= 1"])
        if not args.quad_tol > 0:
            raise _validation_error(["--quad-tol must be positive"])
        raw = load_document(args.config) if args.config else {}
        base_doc = merge_defaults(raw)
        build_config(base_doc)
        seed = args.seed if args.seed is not None else int(base_doc.get("seed", DEFAULT_SEED))
        ctx = RunContext(base_doc, args.out_dir, seed, args.threads, QuadratureSpec(rel_tol=args.quad_tol),
                         _order_for(args.quad_tol))
        if args.command == "run":
            specs = parse_experiments(load_document(args.experiment), base_doc)
        else:
            if args.n_geometry < 1 or args.n_fading < 1:
                raise _validation_error(["Monte Carlo sizes must be positive"])
            specs = [ExperimentSpec("figure", None, [], f"{args.name}.csv", args.name, {},
                                    McSpec(args.n_geometry, args.n_fading, None))]
        os.makedirs(args.out_dir, exist_ok=True)
        for spec in specs:
            path = run_experiment(ctx, spec)
            print(path)
    except CliError as err:
        return _fail(err)
    except NonConvergenceError as exc:
        return _fail(CliError(EXIT_NUMERIC, "nonconvergence", [str(exc)]))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
