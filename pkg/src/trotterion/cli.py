"""Scenario-driven command line front end.

Scenarios are JSON files (schema 1) naming a model preset, a
compilation method, an initial state, and observables; running one
writes a CSV with the exact-oracle curve, the ideal-digitized values at
the stroboscopic checkpoints, and optionally noisy estimates. Exit
codes: 0 success, 2 configuration error, 3 compilation error, 4
numerical verification failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

import numpy as np

from .compiler import (
    CompileError,
    CompiledProgram,
    compile_coupling_graph,
    compile_first_order,
    compile_many_body,
    compile_many_body_with_field,
    compile_model_steps,
    compile_second_order,
    compile_time_dependent,
)
from .gates import DurationModel, GateSequence, apply_sequence, sequence_stats, sequence_unitary
from .metrics import GhzMeasurementRecord, ghz_fidelity, hofmann_bounds, process_fidelity, tangle2
from .models import (
    CouplingGraph,
    FieldSpec,
    RampSpec,
    coupling_graph_model,
    ising2,
    long_range_ising,
    many_body_model,
    xy2,
    xyz2,
)
from .noise import NoiseParams, _draw_eps, _success_probability, perturb_sequence
from .oracle import propagator, time_ordered_propagator
from .pauli import PauliString, StateVector, hamming_histogram

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Scenario file violates the schema."""


class VerificationError(RuntimeError):
    """Compiled program disagrees with the oracle beyond tolerance."""


def _fmt(x: float) -> str:
    return f"{x:.9g}"


# -- scenario loading --------------------------------------------------------


def bundled_scenarios() -> dict:
    """Name -> path for every scenario shipped with the package."""
    base = resources.files("trotterion") / "scenarios"
    return {p.name[: -len(".json")]: p for p in sorted(base.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".json")}


def load_scenario(ref: str) -> dict:
    if os.path.exists(ref):
        with open(ref) as f:
            cfg = json.load(f)
    else:
        names = bundled_scenarios()
        if ref not in names:
            raise ConfigError(f"unknown scenario {ref!r}; try 'trotterion list'")
        cfg = json.loads(names[ref].read_text())
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {cfg.get('schema')!r}")
    for key in ("name", "model", "compile", "initial_state", "observables"):
        if key not in cfg:
            raise ConfigError(f"scenario is missing required key {key!r}")
    if "noise" in cfg and "seed" not in cfg:
        raise ConfigError("a seed is mandatory when noise is requested")
    return cfg


def _build_model(cfg: dict):
    """Resolve the model block to (pauli sum or None, ramp or None, n)."""
    preset = cfg.get("preset")
    if preset == "ising2":
        return ising2(cfg["B"], cfg["J"]), None, 2
    if preset == "xy2":
        return xy2(cfg["B"], cfg["J"]), None, 2
    if preset == "xyz2":
        return xyz2(cfg["B"], cfg["J"]), None, 2
    if preset == "long_range":
        model, _ = long_range_ising(cfg["n"], cfg["B"], cfg["J"])
        return model, None, cfg["n"]
    if preset == "graph":
        graph = CouplingGraph(cfg["n"], np.array(cfg["J"]), cfg.get("phi", 0.0))
        fld = cfg.get("field")
        field = FieldSpec(fld["axis"], fld["strength"]) if fld else None
        return coupling_graph_model(graph, field), None, cfg["n"]
    if preset == "many_body":
        p = PauliString.from_string(cfg["ops"])
        fld = cfg.get("field")
        field = FieldSpec(fld["axis"], fld["strength"]) if fld else None
        return many_body_model(p, cfg.get("strength", 1.0), field), None, p.n
    if preset == "ramp":
        ramp = RampSpec(cfg["theta_t"], cfg["J_start"], cfg["J_end"], cfg["B"])
        return None, ramp, 2
    raise ConfigError(f"unknown model preset {preset!r}")


def _compile(cfg: dict, model, ramp, steps_override: int | None = None) -> CompiledProgram:
    method = cfg.get("method")
    steps = steps_override if steps_override is not None else cfg.get("steps")
    if method == "first_order":
        return compile_first_order(model, cfg["theta"], steps)
    if method == "second_order":
        return compile_second_order(model, cfg["theta"], steps)
    if method == "model_steps":
        return compile_model_steps(
            cfg["kind"], cfg.get("resolution", np.pi / 16), steps,
            jx=cfg.get("jx", 1.0), jy=cfg.get("jy", 1.0), jz=cfg.get("jz", 1.0),
            b=cfg.get("b", 1.0),
        )
    if method == "time_dependent":
        if ramp is None:
            raise ConfigError("time_dependent compilation needs a ramp model")
        return compile_time_dependent(ramp, steps if steps is not None else 8)
    if method == "coupling_graph":
        graph = CouplingGraph(cfg["n"], np.array(cfg["J"]), cfg.get("phi", 0.0))
        return compile_coupling_graph(graph, cfg["theta"])
    if method == "many_body":
        return compile_many_body(PauliString.from_string(cfg["ops"]), cfg["theta"])
    if method == "many_body_with_field":
        return compile_many_body_with_field(
            PauliString.from_string(cfg["ops"]), cfg.get("B", 0.0),
            cfg.get("resolution", np.pi / 4), steps,
        )
    raise ConfigError(f"unknown compile method {method!r}")


# -- initial states and observables -----------------------------------------

_BASIS_VECS = {
    ("x", "+"): np.array([1, 1], complex) / np.sqrt(2),
    ("x", "-"): np.array([1, -1], complex) / np.sqrt(2),
    ("y", "+"): np.array([1, 1j], complex) / np.sqrt(2),
    ("y", "-"): np.array([1, -1j], complex) / np.sqrt(2),
    ("z", "u"): np.array([1, 0], complex),
    ("z", "d"): np.array([0, 1], complex),
}


def parse_state(spec: str, n: int) -> StateVector:
    """'uud' is a z product state; 'x:+-' and 'y:-+' rotate the basis."""
    if ":" in spec:
        basis, labels = spec.split(":", 1)
    else:
        basis, labels = "z", spec
    if basis not in "xyz" or len(labels) != n:
        raise ConfigError(f"bad initial state {spec!r} for {n} spins")
    amps = np.array([1.0 + 0j])
    for c in labels:  # spin 0 first = lowest bit, so it stays innermost
        key = (basis, c)
        if key not in _BASIS_VECS:
            raise ConfigError(f"bad spin label {c!r} in state {spec!r}")
        amps = np.kron(_BASIS_VECS[key], amps)
    return StateVector(n, amps)


def parse_observable(spec: str, n: int):
    """Return (label, callable(state) -> value, is_probability)."""
    parts = spec.split(":")
    if parts[0] == "pauli" and len(parts) == 2:
        p = PauliString(n, parts[1])
        from .pauli import expectation

        return spec, lambda s: expectation(s, p), False
    if parts[0] == "pop" and len(parts) == 3:
        target = parse_state(f"{parts[1]}:{parts[2]}", n)
        return spec, lambda s: float(abs(target.overlap(s)) ** 2), True
    if parts[0] == "ham" and len(parts) == 2:
        k = int(parts[1])
        if not 0 <= k <= n:
            raise ConfigError(f"hamming weight {k} out of range")
        return spec, lambda s: float(hamming_histogram(s)[k]), True
    if spec == "tangle":
        return spec, tangle2, True
    raise ConfigError(f"unknown observable {spec!r}")


# -- scenario execution ------------------------------------------------------


def _exact_states(cfg, model, ramp, psi0, thetas):
    if ramp is not None:
        from .oracle import ramp_evolution

        return ramp_evolution(ramp, psi0, thetas)
    return [StateVector(psi0.n, propagator(model, th) @ psi0.amps) for th in thetas]


def _noisy_rows(seq: GateSequence, psi0, obs_fns, checkpoints, noise_cfg, seed):
    params = NoiseParams(
        sigma_rel=noise_cfg.get("sigma_rel", 0.0),
        miscal=noise_cfg.get("miscal", {}),
        shots=noise_cfg.get("shots", 200),
        seed=seed,
    )
    from .noise import _apply_params

    cps = list(checkpoints)
    hits = np.zeros((len(cps), len(obs_fns)))
    for shot in range(params.shots):
        rng = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(shot,)))
        eps = _draw_eps(rng, params.sigma_rel)
        noisy = _apply_params(seq, params, eps)
        state = psi0
        ci = 0
        for i, g in enumerate(noisy.gates):
            from .gates import apply_gate

            state = apply_gate(state, g)
            if ci < len(cps) and i + 1 == cps[ci]:
                for j, (_, fn, is_prob) in enumerate(obs_fns):
                    prob = fn(state) if is_prob else (1 + fn(state)) / 2
                    hits[ci, j] += rng.random() < prob
                ci += 1
    prob = hits / params.shots
    err_p = np.sqrt(np.clip(prob * (1 - prob), 1e-12, None) / params.shots)
    est = np.array([[2 * p - 1 if not o[2] else p for p, o in zip(row, obs_fns)] for row in prob])
    err = np.array([[2 * e if not o[2] else e for e, o in zip(row, obs_fns)] for row in err_p])
    return est, err


def _run_sweep(cfg, out_dir: str) -> str:
    """Sweep-mode execution: recompile a single-block program per point."""
    model, ramp, n = _build_model(cfg["model"])
    sweep = cfg["compile"]["sweep"]
    thetas = np.linspace(sweep.get("theta_min", 0.0), sweep["theta_max"], sweep["points"])
    psi0 = parse_state(cfg["initial_state"], n)
    obs_fns = [parse_observable(o, n) for o in cfg["observables"]]
    rows = []
    for th in thetas:
        sub = dict(cfg["compile"])
        sub["theta"] = float(th)
        prog = _compile(sub, model, ramp)
        state = apply_sequence(psi0, prog.sequence)
        exact = StateVector(n, propagator(model, th) @ psi0.amps)
        rows.append(("exact", th, [fn(exact) for _, fn, _ in obs_fns], None))
        rows.append(("digital", th, [fn(state) for _, fn, _ in obs_fns], None))
    return _write_csv(cfg, out_dir, obs_fns, rows)


def _write_csv(cfg, out_dir, obs_fns, rows) -> str:
    labels = [o[0] for o in obs_fns]
    path = os.path.join(out_dir, cfg["name"] + ".csv")
    with open(path, "w", newline="") as f:
        header = ["variant", "theta"] + labels + [f"{l}_err" for l in labels]
        f.write(",".join(header) + "\n")
        for variant, th, vals, errs in rows:
            errs = errs if errs is not None else [0.0] * len(vals)
            f.write(",".join([variant, _fmt(th)] + [_fmt(v) for v in vals] + [_fmt(e) for e in errs]) + "\n")
    return path


def run_scenario(ref: str, out_dir: str = ".", seed_override: int | None = None) -> str:
    """Execute one scenario and return the written CSV path."""
    cfg = load_scenario(ref)
    os.makedirs(out_dir, exist_ok=True)
    if "sweep" in cfg["compile"]:
        return _run_sweep(cfg, out_dir)
    model, ramp, n = _build_model(cfg["model"])
    prog = _compile(cfg["compile"], model, ramp)
    psi0 = parse_state(cfg["initial_state"], n)
    obs_fns = [parse_observable(o, n) for o in cfg["observables"]]
    cp_thetas = prog.checkpoint_thetas()
    rows = []
    fine = np.linspace(0.0, cp_thetas[-1], max(4 * len(cp_thetas), 32) + 1)
    for th, state in zip(fine, _exact_states(cfg, model, ramp, psi0, fine)):
        rows.append(("exact", th, [fn(state) for _, fn, _ in obs_fns], None))
    for th, state in zip(cp_thetas, prog.checkpoint_states(psi0)):
        rows.append(("digital", th, [fn(state) for _, fn, _ in obs_fns], None))
    if "verify" in cfg:
        _verify(cfg, model, ramp, prog)
    if "noise" in cfg:
        seed = seed_override if seed_override is not None else cfg["seed"]
        est, err = _noisy_rows(prog.sequence, psi0, obs_fns, prog.checkpoints, cfg["noise"], seed)
        for th, vals, errs in zip(cp_thetas, est, err):
            rows.append(("noisy", th, list(vals), list(errs)))
    return _write_csv(cfg, out_dir, obs_fns, rows)


def _verify(cfg, model, ramp, prog) -> None:
    want = cfg["verify"]["process_fidelity"]
    tol = cfg["verify"].get("tol", 0.01)
    theta = prog.checkpoint_thetas()[-1]
    target = (
        time_ordered_propagator(ramp, 2000, theta) if ramp is not None else propagator(model, theta)
    )
    got = process_fidelity(target, sequence_unitary(prog.sequence))
    if abs(got - want) > tol:
        raise VerificationError(
            f"process fidelity {got:.6f} differs from expected {want} by more than {tol}"
        )


# -- fixture-based fidelity bounds ------------------------------------------


def _read_fixture(path: str):
    with open(path) as f:
        header = f.readline().strip().split(",")
        rows = []
        for line in f:
            if line.strip():
                cells = line.strip().split(",")
                rows.append(dict(zip(header, cells)))
    if "fidelity" not in header:
        raise ConfigError(f"fixture {path} has no fidelity column")
    return header, rows


def bound_from_fixtures(paths, theta: float = np.pi / 4) -> dict:
    """Two-sided process fidelity bound from truth-table fixture CSVs.

    Fixtures with parity columns form the entangling-basis group, the
    rest the eigenbasis group; per-group fidelity averages feed the
    complementary-bases inequality. Parity-table fidelities are also
    recomputed from parities and populations at the given target angle
    as a cross-check.
    """
    f1_vals, f1_uncs, f2_vals, f2_uncs, recomputed = [], [], [], [], []
    for path in paths:
        header, rows = _read_fixture(path)
        parity_cols = sorted(
            (h for h in header if h.startswith("parity") and not h.endswith("_unc")),
            key=lambda h: int(h[len("parity"):]),
        )
        for row in rows:
            fid = float(row["fidelity"])
            unc = float(row.get("fidelity_unc", 0.0))
            if parity_cols:
                f2_vals.append(fid)
                f2_uncs.append(unc)
                parities = tuple(float(row[c]) for c in parity_cols)
                signs = tuple((-1) ** i for i in range(len(parities)))
                rec = GhzMeasurementRecord(
                    theta,
                    float(row["population1"]),
                    float(row["population2"]),
                    parities,
                    signs,
                )
                recomputed.append(ghz_fidelity(rec))
            else:
                f1_vals.append(fid)
                f1_uncs.append(unc)
    if not f1_vals or not f2_vals:
        raise ConfigError("need at least one eigenbasis and one parity fixture")
    F1, u1 = float(np.mean(f1_vals)), float(np.sqrt(np.sum(np.square(f1_uncs))) / len(f1_vals))
    F2, u2 = float(np.mean(f2_vals)), float(np.sqrt(np.sum(np.square(f2_uncs))) / len(f2_vals))
    b = hofmann_bounds(F1, F2, u1, u2)
    return {
        "F1": F1, "F1_unc": u1, "F2": F2, "F2_unc": u2,
        "lower": b.lower, "upper": b.upper,
        "lower_unc": b.lower_unc, "upper_unc": b.upper_unc,
        "F2_recomputed": float(np.mean(recomputed)),
    }


def bundled_fixture(name: str) -> str:
    return str(resources.files("trotterion") / "fixtures" / name)


# -- command line ------------------------------------------------------------


def _cmd_run(args) -> int:
    seed = int(os.environ["TROTTERION_SEED"]) if "TROTTERION_SEED" in os.environ else None
    refs = args.scenario
    if args.jobs > 1 and len(refs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            paths = list(pool.map(run_scenario, refs, [args.out] * len(refs), [seed] * len(refs)))
    else:
        paths = [run_scenario(ref, args.out, seed) for ref in refs]
    for p in paths:
        print(p)
    return 0


def _cmd_compile(args) -> int:
    cfg = load_scenario(args.scenario)
    model, ramp, _ = _build_model(cfg["model"])
    prog = _compile(cfg["compile"], model, ramp, steps_override=args.steps)
    print(prog.sequence.to_text())
    return 0


def _cmd_inspect(args) -> int:
    cfg = load_scenario(args.scenario)
    model, ramp, _ = _build_model(cfg["model"])
    prog = _compile(cfg["compile"], model, ramp, steps_override=args.steps)
    stats = sequence_stats(prog.sequence, DurationModel())
    print(f"scenario: {cfg['name']}")
    print(f"gates: {stats['gate_count']}")
    print(f"wall_time_us: {_fmt(stats['wall_time_us'])}")
    print(f"checkpoints: {len(prog.checkpoints)}")
    return 0


def _cmd_list(_args) -> int:
    for name in bundled_scenarios():
        print(name)
    return 0


def _cmd_bound(args) -> int:
    report = bound_from_fixtures(args.tables, args.theta)
    print(json.dumps({k: round(v, 9) for k, v in report.items()}, indent=2))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="trotterion")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute scenarios and write CSV results")
    p.add_argument("scenario", nargs="+")
    p.add_argument("--out", default=".")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("compile", help="print the gate program of a scenario")
    p.add_argument("scenario")
    p.add_argument("--steps", type=int, default=None)
    p.set_defaults(fn=_cmd_compile)

    p = sub.add_parser("inspect", help="gate count and wall time of a scenario")
    p.add_argument("scenario")
    p.add_argument("--steps", type=int, default=None)
    p.set_defaults(fn=_cmd_inspect)

    p = sub.add_parser("list", help="enumerate bundled scenarios")
    p.set_defaults(fn=_cmd_list)

    p = sub.add_parser("bound", help="fidelity bound from truth-table fixtures")
    p.add_argument("--tables", nargs="+", required=True)
    p.add_argument("--theta", type=float, default=np.pi / 4)
    p.set_defaults(fn=_cmd_bound)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, json.JSONDecodeError, FileNotFoundError, KeyError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except CompileError as e:
        print(f"compilation error: {e}", file=sys.stderr)
        return 3
    except VerificationError as e:
        print(f"verification failure: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
