"""Command-line front end.

    cpmaps verify    --case discordant-uniform
    cpmaps choi      --case figure --map phi2 --t 0.3 --out choi.json
    cpmaps sweep     --case figure --t-max 3.14 --steps 200 --out sweep.csv
    cpmaps bloch     --case figure --map phi1 --t 0 --out bloch.csv
    cpmaps reproduce --case jpa --out repro_jpa/

Times are given as the dimensionless product 2*omega*t.  Exit status is 0 when
every check passes, 1 when a mathematical check fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis, channels, scenarios, states
from .serialize import dumps, encode_kraus, encode_matrix, load_scenario, write_csv, write_json

log = logging.getLogger("cpmaps")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
INVARIANT_TOL = 1e-10
GOLDEN_TOL = 1e-9
MAPS = ("phi1", "phi2", "phiII")
DEFAULT_VERIFY_TIMES = (0.0, 0.4, 1.1, np.pi / 2, 2.6)
SWEEP_HEADER = ("t", "min_choi_eig_phi1", "min_choi_eig_phi2", "tp_defect_phi1",
                "tp_defect_phi2", "dist_domain", "dist_full")
BLOCH_HEADER = ("in_x", "in_y", "in_z", "out_x", "out_y", "out_z")


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario_path: Optional[str] = None
    named_case: Optional[str] = None
    t: Optional[float] = None
    t_max: Optional[float] = None
    steps: int = 50
    samples: int = analysis.DEFAULT_BLOCH_SAMPLES
    tol: Optional[float] = None
    out: Optional[str] = None
    map: Optional[str] = None

    def __post_init__(self):
        if (self.scenario_path is None) == (self.named_case is None):
            raise InputError("give exactly one of --scenario or --case")
        if self.steps < 1:
            raise InputError("--steps must be >= 1")
        if self.samples < 1:
            raise InputError("--samples must be >= 1")
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.map is not None and self.map not in MAPS:
            raise InputError(f"--map must be one of {', '.join(MAPS)}")

    def scenario(self) -> scenarios.Scenario:
        if self.named_case is not None:
            try:
                return scenarios.named_case(self.named_case)
            except KeyError as exc:
                raise InputError(str(exc.args[0])) from exc
        return load_scenario(self.scenario_path)


def _default_map(spec: states.CorrelatedClassSpec, requested: Optional[str]) -> str:
    if requested is None:
        return "phiII" if spec.is_class_two else "phi2"
    if spec.is_class_two and requested != "phiII":
        raise InputError(f"map {requested} needs a class-I scenario; this one is class II")
    if not spec.is_class_two and requested == "phiII":
        raise InputError("map phiII needs a class-II scenario (psi_block present)")
    return requested


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _check(name: str, defect: float, tol: float, **extra) -> dict:
    return {"name": name, **extra, "defect": float(defect), "tol": tol, "pass": bool(defect <= tol)}


def _domain_extremes(spec: states.CorrelatedClassSpec) -> list:
    return [states.domain_member(spec, np.eye(spec.d)[i]) for i in range(spec.d)] + [states.marginal(spec)]


def verify_checks(sc: scenarios.Scenario, times, tol: float) -> list:
    spec = sc.spec
    out = [_check("marginal_consistency",
                  np.linalg.norm(states.marginal(spec) - states.marginal_via_trace(spec)), tol)]
    rho_se = states.assemble_composite(spec)
    rho0 = states.marginal(spec)
    if spec.is_class_two:
        link = states.ghjw_link(spec.w_block, spec.psi_block)
        povm = channels.invariant_povm(spec)
        out += [
            _check("ghjw_isometry", link.isometry_defect(), tol),
            _check("ghjw_link", link.link_defect(spec.w_block, spec.psi_block), tol),
            _check("ghjw_column_sums", link.column_sum_defect(), tol),
            _check("povm_completeness", povm.completeness_defect(), tol),
            _check("povm_invariance", np.linalg.norm(povm.apply(rho0) - rho0), tol),
        ]
    else:
        pvm = sum(channels.basis_projectors(spec))
        out.append(_check("pvm_completeness", np.linalg.norm(pvm - np.eye(spec.n)), tol))
    for t in times:
        u = sc.unitary(t)
        truth = channels.oracle_reduced(rho_se, u, spec.n)
        reps = {}
        for which in (("phiII",) if spec.is_class_two else ("phi1", "phi2")):
            ks = channels.build_kraus(spec, u, which, t)
            rep = analysis.rep_from_kraus(ks)
            reps[which] = rep
            report = analysis.cp_report(rep, tol)
            out += [
                _check(f"tp_{which}", ks.tp_defect(), tol, t=t),
                _check(f"cp_{which}", max(0.0, -report.min_choi_eig), tol, t=t),
                _check(f"oracle_{which}", np.linalg.norm(channels.apply_kraus(ks, rho0) - truth), tol, t=t),
            ]
        if not spec.is_class_two:
            pinch = analysis.rep_from_map(lambda e: channels.diagonalizing_projection(spec, e), spec.n)
            out += [
                _check("composition_identity",
                       np.linalg.norm(reps["phi1"].lam - reps["phi2"].lam @ pinch.lam), tol, t=t),
                _check("domain_agreement",
                       analysis.channel_distance(reps["phi1"], reps["phi2"], _domain_extremes(spec)), tol, t=t),
            ]
    return out


def cmd_verify(cfg: RunConfig) -> int:
    sc = cfg.scenario()
    tol = cfg.tol or INVARIANT_TOL
    times = DEFAULT_VERIFY_TIMES if cfg.t is None else (cfg.t,)
    checks = verify_checks(sc, times, tol)
    ok = all(c["pass"] for c in checks)
    report = {"scenario": sc.name, "class": "II" if sc.spec.is_class_two else "I",
              "tol": tol, "pass": ok, "checks": checks}
    _emit(dumps(report) + "\n", cfg.out)
    for c in checks:
        if not c["pass"]:
            log.error("check %s failed: defect %.3e > %.1e", c["name"], c["defect"], tol)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_choi(cfg: RunConfig) -> int:
    sc = cfg.scenario()
    which = _default_map(sc.spec, cfg.map)
    t = 0.0 if cfg.t is None else cfg.t
    tol = cfg.tol or INVARIANT_TOL
    ks = channels.build_kraus(sc.spec, sc.unitary(t), which, t)
    rep = analysis.rep_from_kraus(ks)
    report = analysis.cp_report(rep, tol)
    doc = {
        "scenario": sc.name, "map": which, "t": t,
        "choi": encode_matrix(rep.choi),
        "choi_input_first": encode_matrix(analysis.choi_input_first(rep)),
        "lambda": encode_matrix(rep.lam),
        "cp_report": report.to_dict(),
        "kraus": encode_kraus(ks),
    }
    _emit(dumps(doc) + "\n", cfg.out)
    return EXIT_OK if report.is_cp and report.tp_defect <= tol else EXIT_FAIL


def sweep_rows(sc: scenarios.Scenario, t_max: float, steps: int) -> list:
    spec = sc.spec
    domain = _domain_extremes(spec)
    rows = []
    for t in np.linspace(0.0, t_max, steps):
        u = sc.unitary(t)
        r1 = analysis.rep_from_kraus(channels.build_phi1_kraus(spec, u, t))
        r2 = analysis.rep_from_kraus(channels.build_phi2_kraus(spec, u, t))
        c1, c2 = analysis.cp_report(r1), analysis.cp_report(r2)
        rows.append((t, c1.min_choi_eig, c2.min_choi_eig, c1.tp_defect, c2.tp_defect,
                     analysis.channel_distance(r1, r2, domain), analysis.channel_distance(r1, r2)))
    return rows


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.t_max is None or not cfg.t_max > 0:
        raise InputError("--t-max must be positive")
    if cfg.steps < 2:
        raise InputError("--steps must be >= 2 for a sweep")
    sc = cfg.scenario()
    if sc.spec.is_class_two:
        raise InputError("sweep compares phi1 and phi2 and needs a class-I scenario")
    tol = cfg.tol or INVARIANT_TOL
    rows = sweep_rows(sc, cfg.t_max, cfg.steps)
    _emit(write_csv(SWEEP_HEADER, rows), cfg.out)
    ok = all(r[1] >= -tol and r[2] >= -tol and r[3] <= tol and r[4] <= tol and r[5] <= tol
             for r in rows)
    return EXIT_OK if ok else EXIT_FAIL


def bloch_rows(sc: scenarios.Scenario, which: str, t: float, samples: int) -> list:
    ks = channels.build_kraus(sc.spec, sc.unitary(t), which, t)
    return [tuple(a) + tuple(b) for a, b in analysis.bloch_image(analysis.rep_from_kraus(ks), samples)]


def cmd_bloch(cfg: RunConfig) -> int:
    sc = cfg.scenario()
    if sc.spec.n != 2:
        raise InputError("bloch needs a qubit scenario (n = 2)")
    which = _default_map(sc.spec, cfg.map or ("phiII" if sc.spec.is_class_two else "phi1"))
    rows = bloch_rows(sc, which, 0.0 if cfg.t is None else cfg.t, cfg.samples)
    _emit(write_csv(BLOCH_HEADER, rows), cfg.out)
    return EXIT_OK


def _diff(name: str, analytic, numeric, tol: float) -> dict:
    d = float(np.max(np.abs(np.asarray(analytic) - np.asarray(numeric))))
    return {"name": name, "max_abs_diff": d, "pass": bool(d <= tol)}


def _reproduce_qubit(sc: scenarios.Scenario, out: Path, tol: float) -> list:
    p, diffs = sc.qubit, []
    for idx, t in enumerate(scenarios.FIGURE_TIMES):
        u = sc.unitary(t)
        r1 = analysis.rep_from_kraus(channels.build_phi1_kraus(sc.spec, u, t))
        r2 = analysis.rep_from_kraus(channels.build_phi2_kraus(sc.spec, u, t))
        pairs = {
            "lambda1": (scenarios.analytic_lambda_phi1(p, t), analysis.lambda_input_rows(r1)),
            "lambda2": (scenarios.analytic_lambda_phi2(p, t), analysis.lambda_input_rows(r2)),
            "choi1": (scenarios.analytic_choi_phi1(p, t), analysis.choi_input_first(r1)),
            "choi2": (scenarios.analytic_choi_phi2(p, t), analysis.choi_input_first(r2)),
        }
        if sc.jpa is not None:
            pairs["choi_jpa"] = (scenarios.jpa_choi(sc.jpa, t), analysis.choi_input_first(r2))
        for key, (ana, num) in pairs.items():
            stem = f"{key}_t{idx}"
            write_json({"t": t, "matrix": encode_matrix(ana)}, out / f"{stem}_analytic.json")
            write_json({"t": t, "matrix": encode_matrix(num)}, out / f"{stem}_numeric.json")
            diffs.append(_diff(stem, ana, num, tol))
        if sc.name == "figure":
            for which in ("phi1", "phi2"):
                rows = bloch_rows(sc, which, t, analysis.DEFAULT_BLOCH_SAMPLES)
                write_csv(BLOCH_HEADER, rows, out / f"bloch_{which}_t{idx}.csv")
    return diffs


def _reproduce_discordant(sc: scenarios.Scenario, out: Path, tol: float) -> list:
    spec = sc.spec
    povm = channels.invariant_povm(spec)
    link = states.ghjw_link(spec.w_block, spec.psi_block)
    expected = scenarios.uniform_discordant_k_operators(spec.n)
    names = [["K+0", "K+1", "K++"], ["K-0", "K-1", "K-+"]]
    diffs = [_diff("lambda_kj", scenarios.UNIFORM_DISCORDANT_LAMBDA, link.lambda_kj, tol)]
    numeric, analytic = {}, {}
    for j in range(2):
        for k in range(3):
            key = names[j][k]
            numeric[key] = encode_matrix(povm.kraus_k[j, k])
            analytic[key] = encode_matrix(expected[key])
            diffs.append(_diff(key, expected[key], povm.kraus_k[j, k], tol))
    w = spec.w
    w_out = sum(kk @ w @ kk.conj().T for kk in povm.kraus_k.reshape(-1, spec.n, spec.n))
    diffs.append(_diff("w_invariance", w, w_out, tol))
    write_json(analytic, out / "povm_kraus_analytic.json")
    write_json(numeric, out / "povm_kraus_numeric.json")
    write_json({"lambda_kj": [[float(x) for x in row] for row in link.lambda_kj]}, out / "ghjw_lambda.json")
    return diffs


def cmd_reproduce(case: str, out_dir, tol: float = GOLDEN_TOL) -> int:
    if case not in scenarios.NAMED_CASES:
        raise InputError(f"unknown case {case!r}; known cases: {', '.join(scenarios.NAMED_CASES)}")
    sc = scenarios.named_case(case)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if sc.qubit is not None:
        diffs = _reproduce_qubit(sc, out, tol)
    else:
        diffs = _reproduce_discordant(sc, out, tol)
    ok = all(d["pass"] for d in diffs)
    write_json({"case": case, "tol": tol, "pass": ok, "diffs": diffs}, out / "report.json")
    for d in diffs:
        if not d["pass"]:
            log.error("%s differs by %.3e", d["name"], d["max_abs_diff"])
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpmaps", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("verify", "run the invariant checks on a scenario"),
                           ("choi", "write the Choi matrix and CP report of one map"),
                           ("sweep", "phi1 vs phi2 diagnostics on a time grid"),
                           ("bloch", "Bloch-sphere image of a qubit map"),
                           ("reproduce", "analytic vs numeric matrices for a named case")):
        p = sub.add_parser(name, help=helptext)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--scenario", metavar="PATH")
        src.add_argument("--case", metavar="NAME")
        p.add_argument("--map", choices=MAPS)
        p.add_argument("--t", type=float, help="time as 2*omega*t")
        p.add_argument("--t-max", type=float)
        p.add_argument("--steps", type=int, default=50)
        p.add_argument("--samples", type=int, default=analysis.DEFAULT_BLOCH_SAMPLES)
        p.add_argument("--tol", type=float)
        p.add_argument("--out", metavar="PATH")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = RunConfig(args.scenario, args.case, args.t, args.t_max, args.steps,
                        args.samples, args.tol, args.out, args.map)
        if args.command == "reproduce":
            if cfg.named_case is None:
                raise InputError("reproduce needs --case")
            return cmd_reproduce(cfg.named_case, cfg.out or f"reproduce_{cfg.named_case}",
                                 cfg.tol or GOLDEN_TOL)
        commands = {"verify": cmd_verify, "choi": cmd_choi, "sweep": cmd_sweep, "bloch": cmd_bloch}
        return commands[args.command](cfg)
    except (ValueError, OSError) as exc:
        # ValueError covers validation, dimension and JSON decoding failures
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
