"""``propload`` command line.

Subcommands: prepare-ladder, evolve, compare, project-ground, verify,
specfun-check (``verify specfun``) and appendix-verify (``verify appendix``).
Runs read an optional JSON config; command-line flags override it.  Units are
natural (``hbar = m = 1``) unless the potential sets ``hbar`` or ``m``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ConfigError", "RunConfig", "build_parser", "main"]


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


HALF_LINE_KINDS = {"radial", "coulomb", "halflinear", "infinitewell", "poschlteller"}
EIGEN_METHOD_KINDS = {"halflinear", "infinitewell", "poschlteller", "coulomb"}
METHODS = ("trotter", "fastforward", "analytic", "varqrte")
POTENTIAL_FLAGS = ("omega", "lam", "k", "a", "alpha", "beta", "e1e2")


@dataclass
class RunConfig:
    """Everything one ``evolve`` run needs."""

    grid: dict = field(default_factory=dict)
    potential: dict = field(default_factory=lambda: {"kind": "harmonic", "omega": 0.5})
    initial: dict = field(default_factory=lambda: {"kind": "plateau"})
    method: str = "analytic"
    times: list = field(default_factory=lambda: [0.8])
    eps: float = 1e-3
    kinetic: str = "stencil"
    compare: str | None = None
    terms: int = 40
    varqrte: dict = field(default_factory=dict)
    output: str | None = None
    report: str | None = None
    seed: int = 0

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(d) - known)
        if extra:
            raise ConfigError(f"config: unknown field(s) {extra}")
        cfg = cls(**d)
        if isinstance(cfg.initial, str):
            cfg.initial = parse_initial(cfg.initial)
        if isinstance(cfg.times, (int, float)):
            cfg.times = [cfg.times]
        return cfg

    def fill_defaults(self) -> None:
        """Missing grid fields: the pilot grid for varqrte, else ``N=9, L=6``."""
        if self.method == "varqrte":
            from .varqrte import PILOT_CONFIG

            base = {"N": PILOT_CONFIG["n_qubits"], "L": PILOT_CONFIG["grid_L"]}
        else:
            base = {"N": 9, "L": 6.0}
        self.grid = {**base, **self.grid}

    def support(self) -> str:
        s = self.grid.get("support")
        if s is None:
            return "positive" if self.potential.get("kind") in HALF_LINE_KINDS else "symmetric"
        return s

    def validate(self) -> None:
        from .hamiltonian import POSITIVE_ONLY, POTENTIAL_KINDS

        self.fill_defaults()
        g = self.grid
        if not isinstance(g.get("N"), int) or g["N"] < 1:
            raise ConfigError("grid.N must be a positive integer")
        if not isinstance(g.get("L"), (int, float)) or not g["L"] > 0:
            raise ConfigError("grid.L must be positive")
        if self.support() not in ("symmetric", "positive"):
            raise ConfigError("grid.support must be 'symmetric' or 'positive'")
        kind = self.potential.get("kind")
        if kind not in POTENTIAL_KINDS:
            raise ConfigError(f"potential.kind must be one of {sorted(POTENTIAL_KINDS)}, got {kind!r}")
        if kind in POSITIVE_ONLY and self.support() != "positive":
            raise ConfigError(f"grid.support: potential {kind!r} needs a positive grid")
        if "kind" not in self.initial:
            raise ConfigError("initial.kind is required")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {list(METHODS)}, got {self.method!r}")
        if self.method == "fastforward" and kind != "harmonic":
            raise ConfigError("method: fastforward needs a harmonic potential")
        if self.method == "fastforward" and self.support() != "symmetric":
            raise ConfigError("grid.support: fastforward needs a symmetric grid")
        if self.method == "varqrte" and kind != "harmonic":
            raise ConfigError("method: varqrte runs the harmonic benchmark only")
        if not self.times:
            raise ConfigError("times must list at least one time")
        for i, t in enumerate(self.times):
            if not isinstance(t, (int, float)) or not t > 0:
                raise ConfigError(f"times[{i}] must be a positive number")
        if self.method == "varqrte" and len(self.times) != 1:
            raise ConfigError("times: varqrte takes a single final time")
        if not self.eps > 0:
            raise ConfigError("eps must be positive")
        if self.kinetic not in ("stencil", "spectral"):
            raise ConfigError("kinetic must be 'stencil' or 'spectral'")
        if not isinstance(self.terms, int) or self.terms < 1:
            raise ConfigError("terms must be a positive integer")


def _number(text: str):
    try:
        v = float(text)
    except ValueError:
        return text
    return int(v) if v.is_integer() and "." not in text and "e" not in text.lower() else v


def parse_initial(text: str) -> dict:
    """``"kind"`` or ``"kind:p=v,q=w"`` into an initial-state dict."""
    kind, _, rest = text.partition(":")
    d = {"kind": kind.strip().lower()}
    for item in filter(None, rest.split(",")):
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"initial: expected name=value, got {item!r}")
        d[name.strip()] = _number(value.strip())
    return d


# building blocks -------------------------------------------------------------

def _grid(cfg: RunConfig):
    from .gridpdf import Grid

    return Grid(cfg.grid["N"], float(cfg.grid["L"]), cfg.support())


def _potential(cfg: RunConfig):
    from .hamiltonian import PotentialSpec

    return PotentialSpec.from_dict(cfg.potential)


def _initial(cfg: RunConfig, spec):
    from .analytic import InitialState

    d = dict(cfg.initial)
    kind = d.pop("kind")
    if kind == "gaussshift":
        # default to the oscillator's own ground-state width
        d.setdefault("omega", spec.params.get("omega", 1.0))
        d.setdefault("m", spec.m)
        d.setdefault("hbar", spec.hbar)
    return InitialState(kind, d)


def _sampled(psi0, grid) -> np.ndarray:
    v = np.asarray(psi0(grid.x), dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ConfigError("initial: state vanishes on every grid point")
    return v / nrm


def _analytic(cfg: RunConfig, spec, grid, t: float) -> np.ndarray:
    from .analytic import EigenSystem, Kernel, closed_form, evolve_eigenbasis, evolve_quadrature

    if spec.kind == "delta":
        return closed_form(spec, None, t, grid.x)
    psi0 = _initial(cfg, spec)
    if spec.kind in EIGEN_METHOD_KINDS:
        return evolve_eigenbasis(EigenSystem.from_potential(spec), psi0, t, grid.x, cfg.terms)
    kernel = Kernel.from_potential(spec, half_line=grid.support == "positive")
    try:
        return closed_form(kernel, psi0, t, grid.x)
    except ValueError as exc:
        if not str(exc).startswith("no closed form"):
            raise
    return evolve_quadrature(kernel, psi0, t, grid.x)


def _density(amps: np.ndarray, delta: float) -> np.ndarray:
    p = np.abs(amps) ** 2
    return p / (p.sum() * delta)


def evolution_csv(x, amps, delta: float, target=None, t: float | None = None) -> str:
    """CSV ``x,re,im,prob_density[,target_density,diff]`` (``t`` column first when given)."""
    dens = _density(amps, delta)
    head = ["x", "re", "im", "prob_density"]
    cols = [x, amps.real, amps.imag, dens]
    if target is not None:
        tg = np.asarray(target(x), dtype=float)
        head += ["target_density", "diff"]
        cols += [tg, dens - tg]
    if t is not None:
        head = ["t"] + head
        cols = [np.full(len(x), t)] + cols
    buf = io.StringIO()
    buf.write(",".join(head) + "\n")
    for row in zip(*cols):
        buf.write(",".join(f"{v:.12g}" for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# commands ----------------------------------------------------------------------

def run_evolve(cfg: RunConfig) -> tuple[str, dict]:
    """Execute an ``evolve`` run; returns the CSV text and a summary dict."""
    from .evolve import TrotterPlan, evolve_dense, evolve_trotter, fastforward_qho
    from .gridpdf import parse_pdf
    from .hamiltonian import build_hamiltonian

    cfg.validate()
    if cfg.method == "varqrte":
        return _run_varqrte(cfg)
    spec = _potential(cfg)
    grid = _grid(cfg)
    target = parse_pdf(cfg.compare) if cfg.compare else None
    multi = len(cfg.times) > 1
    parts, summary = [], {"method": cfg.method, "grid": grid.to_dict(), "potential": spec.to_dict(), "runs": []}
    H = psi0 = None
    if cfg.method in ("trotter", "fastforward"):
        H = build_hamiltonian(spec, grid, "spectral" if cfg.method == "fastforward" else cfg.kinetic)
        psi0 = _sampled(_initial(cfg, spec), grid)
    for t in cfg.times:
        run = {"t": t}
        if cfg.method == "analytic":
            amps = np.asarray(_analytic(cfg, spec, grid, t), dtype=complex)
            run["grid_mass"] = float(np.sum(np.abs(amps) ** 2) * grid.delta)
        else:
            if cfg.method == "trotter":
                amps = evolve_trotter(psi0, H, t, cfg.eps)
                run["n_steps"] = TrotterPlan(t, cfg.eps).n_steps
            else:
                amps = fastforward_qho(psi0, t, grid, spec.m, spec.params["omega"], spec.hbar)
            if grid.N <= 11:
                ref = evolve_dense(psi0, H, t)
                run["fidelity"] = float(abs(np.vdot(ref, amps)) ** 2)
                run["error"] = float(np.linalg.norm(amps - ref))
        if target is not None:
            diff = _density(amps, grid.delta) - target(grid.x)
            run["max_abs_diff"] = float(np.max(np.abs(diff)))
        summary["runs"].append(run)
        text = evolution_csv(grid.x, amps, grid.delta, target, t if multi else None)
        parts.append(text if not parts else text.split("\n", 1)[1])
    return "".join(parts), summary


def _run_varqrte(cfg: RunConfig) -> tuple[str, dict]:
    from .varqrte import PILOT_CONFIG, pilot_problem, pilot_threshold, run_varqrte

    v = {**PILOT_CONFIG, "n_qubits": cfg.grid["N"], "grid_L": float(cfg.grid["L"]),
         "omega": cfg.potential.get("omega", PILOT_CONFIG["omega"]), "T": cfg.times[0], **cfg.varqrte}
    theta0 = None
    stored = pilot_threshold()
    if all(stored["config"].get(k) == v.get(k) for k in ("n_qubits", "layers", "grid_L", "omega", "fit_restarts",
                                                              "fit_seed")):
        theta0 = stored["theta0"]
    ansatz, H, th0 = pilot_problem(v, theta0)
    tr = run_varqrte(ansatz, th0, H, v["T"], v["dtau"], lam=v["lam"], record_every=v.get("record_every", 10))
    summary = {"method": "varqrte", "config": v, "final_fidelity": float(tr.fidelity[-1]), "status": tr.status,
               "notes": tr.notes}
    return tr.to_csv(), summary


def cmd_evolve(args) -> int:
    cfg = _config_from_args(args)
    text, summary = run_evolve(cfg)
    _emit(text, cfg.output)
    if cfg.report:
        _emit(_dumps(summary), cfg.report)
    else:
        sys.stderr.write(_dumps(summary))
    return 0


def _config_from_args(args) -> RunConfig:
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    cfg = RunConfig.from_dict(base)
    if args.N is not None:
        cfg.grid = {**cfg.grid, "N": args.N}
    if args.L is not None:
        cfg.grid = {**cfg.grid, "L": args.L}
    if args.support is not None:
        cfg.grid = {**cfg.grid, "support": args.support}
    flags = {k: getattr(args, k) for k in POTENTIAL_FLAGS + ("hbar", "mass") if getattr(args, k) is not None}
    if "mass" in flags:
        flags["m"] = flags.pop("mass")
    if args.potential is not None:
        cfg.potential = {"kind": args.potential, **flags}
    elif flags:
        cfg.potential = {**cfg.potential, **flags}
    if args.initial is not None:
        cfg.initial = parse_initial(args.initial)
    for name in ("method", "eps", "kinetic", "compare", "terms", "output", "report", "seed"):
        val = getattr(args, name)
        if val is not None:
            setattr(cfg, name, val)
    if args.t is not None:
        cfg.times = [float(s) for s in args.t.split(",")]
    vq = {k: getattr(args, k) for k in ("layers", "dtau") if getattr(args, k) is not None}
    if args.reg is not None:
        vq["lam"] = args.reg
    if vq:
        cfg.varqrte = {**cfg.varqrte, **vq}
    return cfg


def cmd_prepare_ladder(args) -> int:
    from .gridpdf import Grid, parse_pdf
    from .ladder import (LadderSpec, arbitrary_ladder_circuit, explicit_four_level, explicit_two_level,
                         ladder_for_pdf, monotone_ladder_circuit)

    info = {}
    N = args.qubits
    if args.explicit:
        circ = explicit_two_level(N) if args.explicit == "two" else explicit_four_level(N)
        info["explicit"] = args.explicit
    elif args.angles:
        angles = [float(s) for s in args.angles.split(",")]
        k = args.levels if args.levels is not None else len(angles)
        spec = LadderSpec(k, N, angles=tuple(angles))
        circ = monotone_ladder_circuit(spec)
        info.update(k=k, angles=list(spec.angles), levels=[float(v) for v in spec.level_values()])
    elif args.level_values:
        lv = [float(s) for s in args.level_values.split(",")]
        k = int(round(math.log2(len(lv))))
        spec = LadderSpec(k, N, levels=tuple(lv))
        circ = arbitrary_ladder_circuit(spec)
        info.update(k=k, levels=list(spec.levels))
    elif args.pdf:
        grid = Grid(N, args.L)
        spec = ladder_for_pdf(parse_pdf(args.pdf), grid, args.eps)
        circ = arbitrary_ladder_circuit(spec)
        info.update(k=spec.k, levels=list(spec.levels), grid=grid.to_dict(), eps=args.eps,
                    **{k: v for k, v in spec.info.items()})
    else:
        raise ConfigError("prepare-ladder: give --explicit, --angles, --level-values or --pdf")
    state = circ.run()
    out = {
        "n_qubits": circ.n_qubits,
        "n_gates": len(circ),
        "ladder": info,
        "circuit": json.loads(circ.to_json()),
        "state": [[float(a.real), float(a.imag)] for a in state.amps],
    }
    _emit(_dumps(out), args.output)
    return 0


def cmd_project(args) -> int:
    from .evolve import fastforward_qho, project_ground
    from .gridpdf import Grid
    from .hamiltonian import PotentialSpec, build_hamiltonian
    from .ladder import explicit_four_level, explicit_two_level

    grid = Grid(args.N, args.L)
    H = build_hamiltonian(PotentialSpec("harmonic", {"omega": 2.0}, m=0.5), grid, "spectral")
    init = (explicit_two_level if args.initial == "two" else explicit_four_level)(args.N).run()
    w, U = np.linalg.eigh(H.dense())
    ground = U[:, 0]
    overlap = float(abs(np.vdot(ground, init.amps)) ** 2)
    t0 = 2 * math.pi / 2**args.ancilla
    res = project_ground(init, lambda v, t: fastforward_qho(v, t, grid), t0, args.ancilla, shots=args.shots,
                         seed=args.seed, ground_energy=float(w[0]), gap=float(w[1] - w[0]))
    sigma = math.sqrt(overlap * (1 - overlap) / args.shots) if args.shots else float("nan")
    out = {
        **res.to_dict(),
        "t0": t0,
        "seed": args.seed,
        "ground_energy": float(w[0]),
        "overlap": overlap,
        "sigma": sigma,
        "within_3sigma": bool(abs(res.success_rate - overlap) <= 3 * sigma),
        "fidelity": float(abs(np.vdot(ground, res.state.amps)) ** 2),
    }
    _emit(_dumps(out), args.output)
    return 0


def cmd_compare(args) -> int:
    from .gridpdf import parse_pdf

    with open(args.input, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "x" not in rows[0] or "prob_density" not in rows[0]:
        raise ConfigError("compare: input needs x and prob_density columns")
    if "t" in rows[0]:
        t_sel = float(rows[-1]["t"]) if args.t is None else args.t
        rows = [r for r in rows if abs(float(r["t"]) - t_sel) < 1e-12]
    x = np.array([float(r["x"]) for r in rows])
    dens = np.array([float(r["prob_density"]) for r in rows])
    delta = float(x[1] - x[0]) if x.size > 1 else 1.0
    target = parse_pdf(args.target)
    tg = np.asarray(target(x), dtype=float)
    p = dens * delta
    q = tg * delta / max(float(np.sum(tg * delta)), 1e-300)
    out = {
        "target": args.target,
        "points": int(x.size),
        "sup_density": float(np.max(np.abs(dens - tg))),
        "l2": float(np.linalg.norm(p - q)),
        "tv": float(0.5 * np.sum(np.abs(p - q))),
    }
    _emit(_dumps(out), args.output)
    return 0


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suite, summarize

    if args.suite == "appendix" and args.json is None:
        # the appendix report is JSON by default
        from .pathint import appendix_report

        report = [r.to_dict() for r in appendix_report()]
        _emit(_dumps(report), args.output)
        return 0 if all(r["pass"] for r in report) else 1
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    checks = [c for n in names for c in run_suite(n)]
    table = summarize(checks)
    if args.json:
        _emit(_dumps([c.to_dict() for c in checks]), args.json)
    _emit(table + "\n", args.output)
    return 0 if all(c.passed for c in checks) else 1


# parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .verify import SUITES

    p = argparse.ArgumentParser(prog="propload", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    lad = sub.add_parser("prepare-ladder", help="build a ladder circuit and dump its state")
    lad.add_argument("--qubits", type=int, default=6)
    lad.add_argument("--explicit", choices=("two", "four"))
    lad.add_argument("--levels", type=int, help="level exponent k for --angles")
    lad.add_argument("--angles", help="comma-separated monotone-ladder angles")
    lad.add_argument("--level-values", help="comma-separated increasing levels (2**k values)")
    lad.add_argument("--pdf", help="target tag, e.g. normal")
    lad.add_argument("--eps", type=float, default=0.05)
    lad.add_argument("--L", type=float, default=5.0)
    lad.add_argument("--output")
    lad.set_defaults(func=cmd_prepare_ladder)

    ev = sub.add_parser("evolve", help="time-evolve an initial state and write CSV")
    ev.add_argument("--config", help="JSON run config; flags override it")
    ev.add_argument("--method", choices=METHODS)
    ev.add_argument("--potential")
    for name in POTENTIAL_FLAGS + ("hbar", "mass"):
        ev.add_argument(f"--{name}", type=float)
    ev.add_argument("--initial", help="initial state, e.g. plateau or gausspow:a=1,b=2")
    ev.add_argument("--t", help="comma-separated times")
    ev.add_argument("--eps", type=float)
    ev.add_argument("--N", type=int)
    ev.add_argument("--L", type=float)
    ev.add_argument("--support", choices=("symmetric", "positive"))
    ev.add_argument("--kinetic", choices=("stencil", "spectral"))
    ev.add_argument("--compare", help="target pdf tag for target_density and diff columns")
    ev.add_argument("--terms", type=int, help="eigenfunction terms for eigen-expansion potentials")
    ev.add_argument("--layers", type=int)
    ev.add_argument("--dtau", type=float)
    ev.add_argument("--reg", type=float, help="McLachlan regularization")
    ev.add_argument("--seed", type=int)
    ev.add_argument("--output")
    ev.add_argument("--report", help="write the JSON summary here instead of stderr")
    ev.set_defaults(func=cmd_evolve)

    cmp_ = sub.add_parser("compare", help="distances between an evolve CSV and a target pdf")
    cmp_.add_argument("--input", required=True)
    cmp_.add_argument("--target", default="normal")
    cmp_.add_argument("--t", type=float, help="time to select from a multi-time CSV")
    cmp_.add_argument("--output")
    cmp_.set_defaults(func=cmd_compare)

    pr = sub.add_parser("project-ground", help="phase-estimation projection of a ladder onto the oscillator ground state")
    pr.add_argument("--N", type=int, default=8)
    pr.add_argument("--L", type=float, default=4.0)
    pr.add_argument("--ancilla", type=int, default=6)
    pr.add_argument("--shots", type=int, default=1000)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--initial", choices=("two", "four"), default="two")
    pr.add_argument("--output")
    pr.set_defaults(func=cmd_project)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=sorted(SUITES) + ["all"])
    ver.add_argument("--json", help="also write the check records as JSON")
    ver.add_argument("--output")
    ver.set_defaults(func=cmd_verify)

    for alias, suite in (("specfun-check", "specfun"), ("appendix-verify", "appendix")):
        a = sub.add_parser(alias, help=f"alias for 'verify {suite}'")
        a.add_argument("--json")
        a.add_argument("--output")
        a.set_defaults(func=cmd_verify, suite=suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"propload: config error: {exc}\n")
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        sys.stderr.write(f"propload {args.command}: {type(exc).__module__}.{type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
