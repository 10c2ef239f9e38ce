"""Command-line front end: single-shot queries and grid scans.

Subcommands: jm, chsh, region, sample, verify.  Angles are radians only
(tokens like pi/2 are accepted); numeric output defaults to 6 significant
digits; results are emitted as JSON or CSV.  Identical invocations with
identical seeds produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from math import pi, sqrt

import numpy as np

from .chsh import (
    born_table,
    chsh_from_table,
    chsh_operator,
    chsh_value,
    commutator_tensor,
    landau_bound,
    max_over_states,
    sample_estimate,
)
from .compat import (
    busch_criterion,
    parent_povm_search,
    sharpness_threshold,
    sharpness_threshold_closed_form,
)
from .entanglement import (
    CanonicalAngles,
    canonical_setting,
    entanglement_threshold,
    max_chsh_closed_form,
    max_chsh_over_unitaries,
    schmidt_state,
)
from .errors import ChshLabError
from .linalg import eig_hermitian
from .measurement import (
    ChshSetting,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    noisy_family_povms,
    noisy_pauli_povm,
)

PROG = "chshlab"
DEFAULT_PRECISION = 6
MAX_PRECISION = 15


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # JSON diagnostics instead of argparse's exit
        raise UsageError(message)


# ---------- token parsing ----------

_PI_TOKEN = re.compile(r"^([+-]?\d*\.?\d*)\s*pi\s*(?:/\s*(\d*\.?\d+))?$")

_NAMED_AXES = {"x": X_AXIS, "y": Y_AXIS, "z": Z_AXIS}


def parse_angle(token: str) -> float:
    """Radians; plain floats or pi expressions like 'pi/2', '0.25pi', '2pi'."""
    t = token.strip().lower()
    if "deg" in t or t.endswith("d"):
        raise UsageError(f"angle {token!r}: degrees are not accepted, use radians")
    m = _PI_TOKEN.match(t)
    if m:
        coef = m.group(1)
        num = float(coef) if coef not in ("", "+", "-") else float(coef + "1")
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * pi / den
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"cannot parse angle {token!r}") from None


def parse_axis(token: str) -> np.ndarray:
    """Named axis x|y|z or a colon triple like 0:0:1 (normalized)."""
    t = token.strip().lower()
    if t in _NAMED_AXES:
        return _NAMED_AXES[t].copy()
    parts = t.split(":")
    if len(parts) != 3:
        raise UsageError(f"axis {token!r}: expected x, y, z or a colon triple a:b:c")
    try:
        v = np.array([float(p) for p in parts])
    except ValueError:
        raise UsageError(f"axis {token!r}: non-numeric component") from None
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise UsageError(f"axis {token!r} has zero norm")
    return v / norm


def parse_grid(token: str) -> np.ndarray:
    """start:stop:steps with steps >= 1 and start <= stop."""
    parts = token.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {token!r}: expected start:stop:steps")
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise UsageError(f"grid {token!r}: non-numeric field") from None
    if steps < 1:
        raise UsageError(f"grid {token!r}: steps must be >= 1")
    if start > stop:
        raise UsageError(f"grid {token!r}: start must be <= stop")
    return np.linspace(start, stop, steps)


# ---------- output ----------


class Emitter:
    def __init__(self, fmt: str, precision: int, out):
        self.fmt = fmt
        self.precision = precision
        self.out = out

    def num(self, v) -> float:
        return float(f"{float(v):.{self.precision}g}")

    def _rounded(self, obj):
        if isinstance(obj, bool) or obj is None:
            return obj
        if isinstance(obj, (int, np.integer)):
            return int(obj)
        if isinstance(obj, (float, np.floating)):
            return self.num(obj)
        if isinstance(obj, dict):
            return {k: self._rounded(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self._rounded(v) for v in obj]
        return obj

    def json(self, doc: dict) -> None:
        print(json.dumps(self._rounded(doc)), file=self.out)

    def csv(self, header: list[str], rows: list[list], comments: list[str] = ()) -> None:
        for c in comments:
            print(f"# {c}", file=self.out)
        print(",".join(header), file=self.out)
        for row in rows:
            cells = []
            for v in row:
                if isinstance(v, bool):
                    cells.append("true" if v else "false")
                elif isinstance(v, (float, np.floating)):
                    cells.append(f"{self.num(v):.{self.precision}g}")
                else:
                    cells.append(str(v))
            print(",".join(cells), file=self.out)

    def table(self, header: list[str], rows: list[list], doc: dict, comments: list[str] = ()) -> None:
        """Tabular result: doc carries the same data for JSON output."""
        if self.fmt == "csv":
            self.csv(header, rows, comments)
        else:
            self.json(doc)


# ---------- setting construction shared by chsh/sample ----------


def _setting_from_args(args) -> tuple[ChshSetting, dict, bool, tuple | None]:
    """Returns (setting, descriptor, projective, povms-or-None)."""
    if args.canonical is not None and args.noisy is not None:
        raise UsageError("--canonical and --noisy are mutually exclusive")
    if args.canonical is not None:
        tokens = args.canonical.split(",")
        if len(tokens) != 2:
            raise UsageError("--canonical expects two comma-separated angles: theta,phi")
        theta, phi = (parse_angle(t) for t in tokens)
        angles = CanonicalAngles(theta=theta, phi=phi)
        setting = canonical_setting(angles)
        povms = tuple(
            noisy_pauli_povm(ax, 1.0)
            for ax in (
                Z_AXIS,
                np.array([np.sin(phi), 0.0, np.cos(phi)]),
                np.array([np.sin(theta / 2), 0.0, np.cos(theta / 2)]),
                np.array([-np.sin(theta / 2), 0.0, np.cos(theta / 2)]),
            )
        )
        desc = {"kind": "canonical", "theta": theta, "phi": phi, "delta": angles.delta}
        return setting, desc, True, povms
    if args.noisy is not None:
        lam = float(args.noisy)
        povms = noisy_family_povms(lam)
        setting = ChshSetting.from_povms(*povms)
        desc = {"kind": "noisy", "lambda": lam}
        return setting, desc, lam >= 1.0, povms
    raise UsageError("a setting is required: --canonical theta,phi or --noisy lambda")


def _state_from_spec(spec: str) -> np.ndarray:
    s = spec.strip()
    if s == "phi+":
        return schmidt_state(0.5).density_matrix()
    if s.startswith("schmidt:"):
        try:
            e = float(s.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"state {spec!r}: bad entanglement value") from None
        return schmidt_state(e).density_matrix()
    try:
        with open(s, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise UsageError(f"state {spec!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"state file {spec!r}: invalid JSON ({exc})") from None
    entries = payload.get("rho") if isinstance(payload, dict) else payload
    try:
        rho = np.array([[complex(c[0], c[1]) for c in row] for row in entries])
    except (TypeError, IndexError):
        raise UsageError(
            f"state file {spec!r}: expected a 4x4 matrix of [re, im] pairs"
        ) from None
    return rho


# ---------- subcommands ----------


def cmd_jm(args, em: Emitter) -> int:
    axes_tokens = _require(args.axes, "--axes").split(",")
    if len(axes_tokens) != 2:
        raise UsageError("--axes expects two comma-separated axes, e.g. z,x")
    axis1, axis2 = (parse_axis(t) for t in axes_tokens)
    tol = float(args.tol)
    if args.threshold:
        doc = {
            "axes": [list(axis1), list(axis2)],
            "threshold": sharpness_threshold(axis1, axis2, tol),
            "closed_form": sharpness_threshold_closed_form(axis1, axis2),
            "tol": tol,
        }
        em.table(
            ["threshold", "closed_form", "tol"],
            [[doc["threshold"], doc["closed_form"], doc["tol"]]],
            doc,
        )
        return 0
    if args.lam is None:
        raise UsageError("jm requires --lambda VALUE, --lambda START:STOP:STEPS or --threshold")
    lams = parse_grid(args.lam) if ":" in args.lam else [float(args.lam)]

    def decide(lam):
        p = noisy_pauli_povm(axis1, lam)
        q = noisy_pauli_povm(axis2, lam)
        if args.method == "feasibility":
            return parent_povm_search(p, q, tol=tol)
        return busch_criterion(p, q)

    verdicts = []
    for lam in lams:
        v = decide(float(lam))
        verdicts.append(
            {
                "lambda": float(lam),
                "status": v.status.value,
                "margin": v.margin,
                "method": v.method.value,
            }
        )
    doc = {"axes": [list(axis1), list(axis2)], "verdicts": verdicts}
    comments = []
    if len(verdicts) > 1:
        doc["threshold"] = sharpness_threshold(axis1, axis2, tol)
        comments.append(f"threshold = {em.num(doc['threshold']):.{em.precision}g}")
    rows = [[v["lambda"], v["status"], v["margin"], v["method"]] for v in verdicts]
    em.table(["lambda", "status", "margin", "method"], rows, doc, comments)
    return 0


def cmd_chsh(args, em: Emitter) -> int:
    setting, desc, projective, _ = _setting_from_args(args)
    if args.max and args.state:
        raise UsageError("--state and --max are mutually exclusive")
    if not args.max and not args.state:
        raise UsageError("chsh requires --state SPEC or --max")
    doc: dict = {"setting": desc}
    if projective:
        rep = landau_bound(setting)
        doc["bound"] = rep.bound
        doc["mu"] = rep.mu
    else:
        rep = max_over_states(setting)
        doc["bound"] = rep.bound
    if args.max:
        rep = max_over_states(setting)
        doc["value"] = rep.value
        doc["violates"] = bool(rep.value > 2.0 + 1e-9)
    else:
        rho = _state_from_spec(args.state)
        value = chsh_value(setting, rho)
        doc["state"] = args.state
        doc["value"] = value
        doc["violates"] = bool(value > 2.0 + 1e-9)
    header = ["value", "bound", "violates"]
    row = [doc["value"], doc["bound"], doc["violates"]]
    em.table(header, [row], doc)
    return 0


def cmd_region(args, em: Emitter) -> int:
    e_grid = parse_grid(_require(args.e_grid, "--e-grid"))
    d_grid = parse_grid(_require(args.delta_grid, "--delta-grid"))
    for e in e_grid:
        if not 0.0 <= e <= 0.5:
            raise UsageError(f"entanglement grid value {e} outside [0, 0.5]")
    for d in d_grid:
        if not 0.0 <= d <= 1.0:
            raise UsageError(f"incompatibility grid value {d} outside [0, 1]")
    threshold = entanglement_threshold()
    rows = []
    for e in e_grid:
        for d in d_grid:
            f = max_chsh_closed_form(float(e), float(d))
            rows.append([float(e), float(d), f, bool(f > 2.0 + 1e-12)])
    doc = {
        "entanglement_threshold": threshold,
        "rows": [
            {"e": r[0], "delta": r[1], "chsh_max": r[2], "nonlocal": r[3]} for r in rows
        ],
    }
    em.table(
        ["E", "delta", "chsh_max", "nonlocal"],
        rows,
        doc,
        comments=[f"entanglement_threshold = {em.num(threshold):.{em.precision}g}"],
    )
    return 0


def cmd_sample(args, em: Emitter) -> int:
    setting, desc, _, povms = _setting_from_args(args)
    if not args.state:
        raise UsageError("sample requires --state SPEC")
    if args.shots < 1:
        raise UsageError("--shots must be >= 1")
    rho = _state_from_spec(args.state)
    result = sample_estimate(povms, rho, args.shots, args.seed)
    exact = chsh_from_table(born_table(*povms, rho))
    diff = abs(result.estimate - exact)
    if result.std_error > 0.0:
        n_sigma = diff / result.std_error
    else:
        n_sigma = 0.0 if diff == 0.0 else None
    doc = {
        "setting": desc,
        "state": args.state,
        "shots_per_pair": result.shots_per_pair,
        "seed": result.seed,
        "estimate": result.estimate,
        "std_error": result.std_error,
        "exact": exact,
        "n_sigma": n_sigma,
    }
    em.table(
        ["estimate", "std_error", "exact", "n_sigma"],
        [[doc["estimate"], doc["std_error"], doc["exact"], doc["n_sigma"]]],
        doc,
    )
    return 0


# ---------- verify suites ----------


def _suite_f1(seed: int) -> list[dict]:
    worst = 0.0
    for e in np.linspace(0.0, 0.5, 5):
        for th in np.linspace(0.0, pi / 2, 5):
            for ph in np.linspace(0.0, pi / 2, 5):
                angles = CanonicalAngles(theta=float(th), phi=float(ph))
                got, _ = max_chsh_over_unitaries(float(e), angles, restarts=20, seed=seed)
                want = max_chsh_closed_form(float(e), angles.delta)
                worst = max(worst, abs(got - want))
    return [{"check": "closed_vs_numeric", "max_dev": worst, "tol": 1e-6}]


def _random_projective_setting(rng) -> ChshSetting:
    axes = rng.normal(size=(4, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    return ChshSetting.from_axes(*axes)


def _suite_landau(seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    worst_identity = 0.0
    worst_bound = 0.0
    violations = 0
    for _ in range(500):
        setting = _random_projective_setting(rng)
        s = chsh_operator(setting)
        j = commutator_tensor(setting)
        worst_identity = max(
            worst_identity, float(np.max(np.abs(s @ s - 4 * np.eye(4) - 4 * j)))
        )
        rep = landau_bound(setting)
        spectral = float(np.max(np.abs(eig_hermitian(s).eigenvalues)))
        worst_bound = max(worst_bound, abs(rep.bound - spectral))
        comm_a = setting.a0 @ setting.a1 - setting.a1 @ setting.a0
        comm_b = setting.b0 @ setting.b1 - setting.b1 @ setting.b0
        if np.max(np.abs(comm_a)) > 1e-9 and np.max(np.abs(comm_b)) > 1e-9:
            if not rep.bound > 2.0 + 1e-12:
                violations += 1
    return [
        {"check": "squared_identity", "max_dev": worst_identity, "tol": 1e-9},
        {"check": "bound_vs_spectrum", "max_dev": worst_bound, "tol": 1e-9},
        {"check": "noncommuting_violates", "max_dev": float(violations), "tol": 0.0},
    ]


def _suite_jm(seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    disagreements = 0
    tested = 0
    while tested < 200:
        axes = rng.normal(size=(2, 3))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        lam = rng.uniform(0.0, 1.0)
        p = noisy_pauli_povm(axes[0], lam)
        q = noisy_pauli_povm(axes[1], lam)
        analytic = busch_criterion(p, q)
        if abs(analytic.margin) < 5e-3:
            continue
        tested += 1
        numeric = parent_povm_search(p, q)
        if numeric.status is not analytic.status:
            disagreements += 1
    threshold_dev = abs(sharpness_threshold(Z_AXIS, X_AXIS, 1e-9) - 1.0 / sqrt(2.0))
    return [
        {"check": "analytic_vs_feasibility", "max_dev": float(disagreements), "tol": 0.0},
        {"check": "threshold_z_x", "max_dev": threshold_dev, "tol": 1e-6},
    ]


_SUITES = {"f1": _suite_f1, "landau": _suite_landau, "jm": _suite_jm}


def cmd_verify(args, em: Emitter) -> int:
    if args.list:
        if em.fmt == "json":
            em.json({"suites": sorted(_SUITES)})
        else:
            for name in sorted(_SUITES):
                print(name, file=em.out)
        return 0
    if not args.suite:
        raise UsageError("verify requires a suite name or --list")
    if args.suite not in _SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; available: {', '.join(sorted(_SUITES))}")
    checks = _SUITES[args.suite](args.seed)
    all_passed = True
    for c in checks:
        c["passed"] = bool(c["max_dev"] <= c["tol"])
        all_passed &= c["passed"]
    if em.fmt == "json":
        em.json({"suite": args.suite, "seed": args.seed, "checks": checks, "passed": all_passed})
    else:
        for c in checks:
            status = "PASS" if c["passed"] else "FAIL"
            print(
                f"{status} {args.suite}.{c['check']} "
                f"max_dev={em.num(c['max_dev']):.{em.precision}g} tol={c['tol']:g}",
                file=em.out,
            )
        print("OK" if all_passed else "FAILED", file=em.out)
    return 0 if all_passed else 1


# ---------- parser ----------


def _add_common(sp, formats=("json", "csv"), default_format="json") -> None:
    sp.add_argument("--format", choices=formats, default=default_format)
    sp.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    sp.add_argument("--output", default=None, help="write to a file instead of stdout")
    sp.add_argument("--config", default=None, help="JSON file with flag defaults")


def _require(value, flag: str):
    # required flags stay optional at the argparse level so a config file
    # can supply them; presence is enforced here instead
    if value is None:
        raise UsageError(f"{flag} is required (flag or config file)")
    return value


def build_parser() -> tuple[_Parser, dict[str, set[str]]]:
    parser = _Parser(prog=PROG, description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    dests: dict[str, set[str]] = {}

    jm = sub.add_parser("jm", description="joint measurability of a noisy-Pauli pair")
    jm.add_argument("--axes", default=None, help="two axes, e.g. z,x or z,0.6:0:0.8")
    jm.add_argument("--lambda", dest="lam", default=None, help="sharpness value or START:STOP:STEPS")
    jm.add_argument("--threshold", action="store_true", help="bisect the critical sharpness")
    jm.add_argument("--method", choices=("analytic", "feasibility"), default="analytic")
    jm.add_argument("--tol", type=float, default=1e-9)
    _add_common(jm)
    jm.set_defaults(func=cmd_jm)

    ch = sub.add_parser("chsh", description="CHSH value / spectral bound for a setting")
    ch.add_argument("--canonical", default=None, help="theta,phi in radians (pi tokens ok)")
    ch.add_argument("--noisy", default=None, type=float, help="noisy-Pauli family sharpness")
    ch.add_argument("--state", default=None, help="phi+ | schmidt:E | JSON file")
    ch.add_argument("--max", action="store_true", help="maximize over states instead")
    _add_common(ch)
    ch.set_defaults(func=cmd_chsh)

    rg = sub.add_parser("region", description="nonlocality region scan over (E, delta)")
    rg.add_argument("--e-grid", dest="e_grid", default=None, help="START:STOP:STEPS over [0, 0.5]")
    rg.add_argument("--delta-grid", dest="delta_grid", default=None, help="START:STOP:STEPS over [0, 1]")
    _add_common(rg)
    rg.set_defaults(func=cmd_region)

    sm = sub.add_parser("sample", description="finite-shot CHSH estimate")
    sm.add_argument("--canonical", default=None)
    sm.add_argument("--noisy", default=None, type=float)
    sm.add_argument("--state", default=None)
    sm.add_argument("--shots", type=int, default=1_000_000)
    sm.add_argument("--seed", type=int, default=0)
    sm.set_defaults(max=False)
    _add_common(sm)
    sm.set_defaults(func=cmd_sample)

    vf = sub.add_parser("verify", description="cross-oracle verification suites")
    vf.add_argument("suite", nargs="?", default=None)
    vf.add_argument("--list", action="store_true")
    vf.add_argument("--seed", type=int, default=0)
    _add_common(vf, formats=("text", "json"), default_format="text")
    vf.set_defaults(func=cmd_verify)

    for name, sp in sub.choices.items():
        dests[name] = {a.dest for a in sp._actions if a.dest not in ("help",)}
    return parser, dests


def _load_config(argv: list[str]) -> dict | None:
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config expects a path")
            path = argv[i + 1]
            break
        if tok.startswith("--config="):
            path = tok.split("=", 1)[1]
            break
    else:
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path!r}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path!r}: expected a JSON object")
    return cfg


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser, dests = build_parser()
        cfg = _load_config(argv)
        if cfg:
            known = set().union(*dests.values())
            unknown = set(cfg) - known
            if unknown:
                raise UsageError(f"config: unknown keys {sorted(unknown)}")
            for sp in parser._subparsers._group_actions[0].choices.values():
                sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests[sp.prog.split()[-1]]})
        args = parser.parse_args(argv)
        precision = int(args.precision)
        if not 1 <= precision <= MAX_PRECISION:
            raise UsageError(f"--precision must be in [1, {MAX_PRECISION}]")
        out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
        try:
            em = Emitter(args.format, precision, out)
            return args.func(args, em)
        finally:
            if args.output:
                out.close()
    except UsageError as exc:
        print(json.dumps({"code": "usage", "message": str(exc)}), file=sys.stderr)
        return 2
    except ChshLabError as exc:
        code = type(exc).__name__.removesuffix("Error")
        code = re.sub(r"(?<!^)(?=[A-Z])", "_", code).lower()
        print(json.dumps({"code": code, "message": str(exc)}), file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
