"""Command-line front end.

    qphase {transform|smooth|evolve|oracle|verify} --config run.ini
           [--out DIR] [--seed N] [--only CRITERION]

The config is a flat INI file; ``[grid]`` and ``[run]`` are typed, every
other section is a table of strings read by the command that needs it::

    [grid]
    nx = 256
    npts = 256
    x_half = 8.0

    [run]
    output_dir = out
    seed = 0

    [state]
    spec = ho n=3

    [kernel]
    spec = gaussian sigma=matched
    mode = single

State specs: ``gaussian sigma=S [x0=X p0=P]``, ``ho n=N [omega=W]``,
``example-eq``, ``coherent x0=X p0=P``, ``random nmax=N`` (uses the seed),
``mixture 2/3,2/3,-1/3 ho:0,1,2`` and ``file PATH`` (a field dump).
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance
from .dynamics import PotentialSpec, invariance_monitor, period, propagate
from .entropy import information, s2
from .grid import GridSpec, make_grid, read_field, write_field
from .oscillator import (OscillatorParams, ho_eigenstate, ho_info_ladder,
                         ho_info_ladder_exact, ho_smoothed_closed)
from .smoothing import (admissibility_test, counterexample_suite, gaussian_kernel,
                        pure_state_kernel, smooth, witness_catalog)
from .states import coherent_psi, example_psi, gaussian_psi, random_superposition
from .wigner import MixtureSpec, marginals, mix, wigner_from_psi

COMMANDS = ("transform", "smooth", "evolve", "oracle", "verify")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    tables: dict = field(default_factory=dict)
    output_dir: str = "out"
    seed: int = 0

    def table(self, name):
        return self.tables.get(name, {})

    def serialize(self):
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["grid"] = {f.name: repr(getattr(self.grid, f.name)) for f in fields(GridSpec)}
        cp["run"] = {"output_dir": self.output_dir, "seed": str(self.seed)}
        for name in sorted(self.tables):
            cp[name] = dict(self.tables[name])
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def parse(cls, text):
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        kwargs = {}
        if cp.has_section("grid"):
            types = {f.name: f.type for f in fields(GridSpec)}
            for key, value in cp["grid"].items():
                if key not in types:
                    raise ConfigError(f"unknown grid key {key!r}")
                kwargs[key] = int(value) if key in ("nx", "npts") else float(value)
        spec = GridSpec(**kwargs)
        spec.validate()
        run = cp["run"] if cp.has_section("run") else {}
        tables = {s: dict(cp[s]) for s in cp.sections() if s not in ("grid", "run")}
        return cls(spec, tables, run.get("output_dir", "out"), int(run.get("seed", 0)))

    @classmethod
    def load(cls, path):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.parse(text)


def _kv(tokens):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def build_state(spec, grid, seed=0):
    """Parse a state spec into ``(field, psi)``; ``psi`` is None for mixtures and files."""
    tokens = spec.split()
    if not tokens:
        raise ConfigError("empty state spec")
    kind, rest = tokens[0], tokens[1:]
    if kind == "file":
        if len(rest) != 1:
            raise ConfigError("file spec needs exactly one path")
        try:
            w = read_field(rest[0])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"unreadable field file {rest[0]}: {exc}") from None
        return w, None
    if kind == "mixture":
        if len(rest) != 2 or not rest[1].startswith("ho:"):
            raise ConfigError("mixture spec is 'mixture w1,w2,... ho:n1,n2,...'")
        weights = [float(Fraction(x)) for x in rest[0].split(",")]
        ns = [int(x) for x in rest[1][3:].split(",")]
        if len(ns) != len(weights):
            raise ConfigError("mixture needs one weight per member")
        return mix(MixtureSpec(weights, [ho_eigenstate(n, grid=grid) for n in ns])), None
    kw = _kv(rest)
    try:
        if kind == "gaussian":
            psi = gaussian_psi(grid, float(kw["sigma"]), float(kw.get("x0", 0)),
                               float(kw.get("p0", 0)))
        elif kind == "ho":
            params = OscillatorParams.for_grid(grid, float(kw.get("omega", 1.0)))
            psi = ho_eigenstate(int(kw["n"]), params, grid)
        elif kind == "example-eq":
            psi = example_psi(grid)
        elif kind == "coherent":
            psi = coherent_psi(grid, float(kw.get("x0", 0)), float(kw.get("p0", 0)))
        elif kind == "random":
            psi = random_superposition(grid, np.random.default_rng(seed),
                                       nmax=int(kw.get("nmax", 6)))
        else:
            raise ConfigError(f"unknown state {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"state {kind!r} is missing {exc.args[0]!r}") from None
    return wigner_from_psi(psi), psi


def _x_std(w):
    mx, _ = marginals(w)
    x = w.grid.x_values
    norm = mx.sum()
    mean = (x * mx).sum() / norm
    return float(math.sqrt(((x - mean) ** 2 * mx).sum() / norm))


def build_kernel(spec, grid, target, seed=0):
    tokens = spec.split()
    if tokens and tokens[0] == "gaussian":
        kw = _kv(tokens[1:])
        sigma = kw.get("sigma", "matched")
        if sigma == "matched":
            omega = float(kw.get("omega", 1.0))
            width = OscillatorParams.for_grid(grid, omega).sigma
        elif sigma == "std":
            width = _x_std(target)
        else:
            width = float(sigma)
        return gaussian_kernel(width, grid)
    _, psi = build_state(spec, grid, seed)
    if psi is None:
        raise ConfigError("kernels must be pure states")
    return pure_state_kernel(psi)


def build_potential(spec, grid):
    tokens = spec.split()
    kind, kw = tokens[0], _kv(tokens[1:])
    if kind == "harmonic":
        return PotentialSpec.harmonic(grid, float(kw.get("omega", 1.0)))
    if kind == "quartic":
        return PotentialSpec.quartic(grid, float(kw["a"]), float(kw.get("b", 0.0)))
    if kind == "free":
        return PotentialSpec.free(grid)
    raise ConfigError(f"unknown potential {kind!r}")


def _fmt(v):
    return format(float(v), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v
                             for v in row])


def _jsonl(path, records):
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, default=float) + "\n")


def _capture(func, *args, **kwargs):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = func(*args, **kwargs)
    notes = [str(w.message) for w in caught]
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    return out, notes


def _setup(config):
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return make_grid(config.grid), out


def _state_spec(config):
    spec = config.table("state").get("spec")
    if not spec:
        raise ConfigError("config needs [state] spec")
    return spec


def cmd_transform(config):
    grid, out = _setup(config)
    spec = _state_spec(config)
    (w, _), notes = _capture(build_state, spec, grid, config.seed)
    write_field(out / "wigner.bin", w)
    mx, mp = marginals(w)
    rows = [("x", x, v) for x, v in zip(w.grid.x_values, mx)]
    rows += [("p", p, v) for p, v in zip(w.grid.p_values, mp)]
    _write_csv(out / "marginals.csv", ("axis", "coordinate", "density"), rows)
    report = s2(w).as_dict()
    _jsonl(out / "report.jsonl", [dict(report, state=spec, warnings=notes)])
    print(f"{spec}: s2 = {report['s2']:.12g}, min W = {report['min_value']:.6g}")
    return 0


def cmd_smooth(config):
    grid, out = _setup(config)
    ktab = config.table("kernel")
    mode = ktab.get("mode", "single")
    if mode == "counterexample":
        r = counterexample_suite(grid)
        ok = r.rel_error <= 1e-4 and r.route_rel_diff <= 1e-6
        _jsonl(out / "counterexample.jsonl", [{
            "direct": r.direct, "spectral": r.spectral, "expected": r.expected,
            "rel_error": r.rel_error, "route_rel_diff": r.route_rel_diff,
            "passed": ok}])
        print(f"{'PASS' if ok else 'FAIL'} counterexample: {r.direct:.15g} "
              f"vs -1/(27 pi hbar) = {r.expected:.15g}")
        return 0 if ok else 1
    spec = _state_spec(config)
    (w, _), notes = _capture(build_state, spec, grid, config.seed)
    kspec = ktab.get("spec", "gaussian sigma=matched")
    if mode == "sweep":
        center = build_kernel(kspec, grid, w, config.seed).sigma
        if center is None:
            raise ConfigError("sweep mode needs a gaussian kernel")
        lo, hi = float(ktab.get("sweep_min", 0.25)), float(ktab.get("sweep_max", 4.0))
        sigmas = center * np.geomspace(lo, hi, int(ktab.get("sweep_points", 20)))
        vals, more = _capture(lambda: [s2(smooth(w, gaussian_kernel(s, grid))).s2
                                       for s in sigmas])
        _write_csv(out / "sweep.csv", ("sigma", "s2"), zip(sigmas, vals))
        best = float(sigmas[int(np.argmin(vals))])
        _jsonl(out / "sweep_summary.jsonl", [{"state": spec, "kernel": kspec,
                                              "reference_sigma": center,
                                              "argmin_sigma": best,
                                              "min_s2": float(min(vals)),
                                              "warnings": notes + more}])
        print(f"{spec}: S2 minimal at sigma = {best:.6g} (reference {center:.6g})")
        return 0
    if mode != "single":
        raise ConfigError(f"unknown kernel mode {mode!r}")
    kernel, more = _capture(build_kernel, kspec, grid, w, config.seed)
    wbar = smooth(w, kernel)
    write_field(out / "smoothed.bin", wbar)
    before, after = s2(w), s2(wbar)
    _write_csv(out / "entropy.csv",
               ("state", "kernel", "s2_before", "s2_after", "min_before", "min_after"),
               [(spec, kspec, before.s2, after.s2, before.min_value, after.min_value)])
    verdict = admissibility_test(wbar, witness_catalog(grid, seed=config.seed))
    _jsonl(out / "verdict.jsonl", [{
        "state": spec, "kernel": kspec, "kernel_sigma": kernel.sigma,
        "s2_before": before.s2, "s2_after": after.s2,
        "min_overlap": verdict.min_overlap, "worst_witness": verdict.worst_witness,
        "n_witnesses": verdict.n_tests, "passed": verdict.passed,
        "warnings": notes + more}])
    print(f"{spec} * {kspec}: s2 {before.s2:.12g} -> {after.s2:.12g}; "
          f"witness test {'passed' if verdict.passed else 'FAILED'} "
          f"(min overlap {verdict.min_overlap:.3e})")
    return 0


def cmd_evolve(config):
    grid, out = _setup(config)
    spec = _state_spec(config)
    (w, _), notes = _capture(build_state, spec, grid, config.seed)
    phi = build_potential(config.table("potential").get("spec", "harmonic"), grid)
    etab = config.table("evolution")
    if "periods" in etab:
        per_period = int(etab.get("steps_per_period", 256))
        steps = int(round(float(etab["periods"]) * per_period))
        dt = period(phi) / per_period
    else:
        try:
            dt, steps = float(etab["dt"]), int(etab["steps"])
        except KeyError as exc:
            raise ConfigError(f"[evolution] needs {exc.args[0]!r} or 'periods'") from None
    (final, log), more = _capture(propagate, w, phi, dt, steps,
                                  cfl_warn=etab.get("cfl_warn", "no") == "yes")
    log.to_csv(out / "evolution.csv")
    write_field(out / "final.bin", final)
    rep = invariance_monitor(log)
    p0, p1 = marginals(w)[1], marginals(final)[1]
    summary = {"state": spec, "potential": phi.kind, "dt": dt, "steps": steps,
               "final_vs_initial": final.max_abs_diff(w),
               "p_marginal_change": float(np.max(np.abs(p1 - p0))),
               "mass_drift": rep.mass_drift, "quad_drift": rep.quad_drift,
               "energy_drift": rep.energy_drift, "s2_drift": rep.s2_drift,
               "warnings": notes + more}
    _jsonl(out / "summary.jsonl", [summary])
    print(f"{spec} under {phi.kind}: {steps} steps of {dt:.6g}; "
          f"|W(T) - W(0)| = {summary['final_vs_initial']:.3e}, "
          f"quad drift {rep.quad_drift:.3e}")
    return 0


def cmd_oracle(config):
    grid, out = _setup(config)
    n_max = int(config.table("oracle").get("n_max", 8))
    params = OscillatorParams.for_grid(grid)
    kernel = gaussian_kernel(params.sigma, grid)
    rows, records = [], []
    for n in range(n_max + 1):
        exact = ho_info_ladder_exact(n)
        closed = information(ho_smoothed_closed(n, params, grid))
        numeric = information(smooth(wigner_from_psi(ho_eigenstate(n, params, grid)), kernel))
        rows.append((n, str(exact), ho_info_ladder(n), closed, numeric))
        records.append({"n": n, "exact": str(exact), "value": ho_info_ladder(n),
                        "closed_form_quadrature": closed, "numerical_smoothing": numeric})
    _write_csv(out / "ladder.csv", ("n", "exact", "value", "closed_form_quadrature",
                                    "numerical_smoothing"), rows)
    _jsonl(out / "ladder.jsonl", records)
    for r in rows:
        print(f"n={r[0]:3d}  I = {r[1]:>14s} = {r[2]:.15f}  grid {r[4]:.15f}")
    return 0


def cmd_verify(config, only=None):
    results = acceptance.run(only)
    records = [{"id": r.id, "title": r.title, "passed": r.passed, "details": r.details}
               for r in results]
    if config is not None:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        _jsonl(out / "verify.jsonl", records)
    for r in results:
        print(r.line())
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    return 0 if n_pass == len(results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="qphase", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="INI run config (optional for verify)")
    parser.add_argument("--out", help="output directory (overrides [run] output_dir)")
    parser.add_argument("--seed", type=int, help="seed (overrides [run] seed)")
    parser.add_argument("--only", action="append", choices=list(acceptance.CRITERIA),
                        help="run only this criterion (verify; repeatable)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            config = RunConfig.load(args.config)
        elif args.command == "verify":
            config = RunConfig() if args.out else None
        else:
            raise ConfigError(f"{args.command} needs --config")
        if config is not None:
            if args.out:
                config.output_dir = args.out
            if args.seed is not None:
                if args.seed < 0:
                    raise ConfigError("seed must be non-negative")
                config.seed = args.seed
        if args.command == "verify":
            return cmd_verify(config, args.only)
        return {"transform": cmd_transform, "smooth": cmd_smooth, "evolve": cmd_evolve,
                "oracle": cmd_oracle}[args.command](config)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
