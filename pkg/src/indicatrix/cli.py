"""Command-line entry point: ``indicatrix <command> [options]``.

Every command reads a domain or profile JSON, writes CSV/JSON artifacts to
``--out`` and prints a JSON summary.  Outputs carry ``"schema": "v1"``, a
hash of the resolved configuration and the numeric defaults, and contain no
timestamps, so identical configurations give byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 engine or domain mismatch,
4 numerical accuracy failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import errors
from .apnorms import growth_fit, lemma1_integrand_scan
from .geometry import (Special, boundary_normal_exponent, build_theorem3_domain,
                       domain_from_json, junction_mismatches, make_surrogate_profile,
                       minkowski_dimension, profile_from_json, sample_boundary,
                       straight_segment_scan, svg_path)
from .integrability import critical_exponent_estimate, dyadic_energies, membership_verdict
from .moduli import (ChiMap, critical_exponent_power, doubling_holds, identity6_residual,
                     modulus_from_json, regularize_modulus, theorem2_diverges, theorem2_integral,
                     theta_p_curve)
from .sobolev import remark1_bound, sobolev_membership_sweep, sobolev_threshold_from_dimension
from .spectra import grid_transform, has_closed_form, transform

SCHEMA = "v1"
DEFAULTS = {"grid": 1024, "angular": 512, "seed": 42}
EXIT_CONFIG, EXIT_MISMATCH, EXIT_ACCURACY = 2, 3, 4


class EngineMismatch(errors.IndicatrixError):
    """Two engines disagree beyond their stated tolerance."""


@dataclass
class RunConfig:
    command: str
    params: dict
    domain: dict | None = None
    out: str = "."
    extra: dict = field(default_factory=dict)

    def canonical(self) -> dict:
        return {"command": self.command, "domain": self.domain, "params": self.params}

    @property
    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def header(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "config_hash": self.hash,
                "defaults": DEFAULTS, "config": self.canonical()}


# parsing helpers --------------------------------------------------------------

def _range(text: str, kind=float):
    """``"a..b"`` -> ``(a, b)``."""
    try:
        a, b = str(text).split("..")
        return kind(a), kind(b)
    except ValueError:
        raise errors.ConfigError(f"expected a range 'a..b', got {text!r}") from None


def _floats(value) -> list:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    try:
        return [float(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise errors.ConfigError(f"expected a comma-separated list of numbers, got {value!r}") from None


def _ladder(value) -> list:
    """``"a..b:n"`` geometric ladder, or an explicit list."""
    if isinstance(value, str) and ".." in value:
        rng, _, count = value.partition(":")
        a, b = _range(rng)
        n = int(count) if count else 25
        if a <= 0 or b <= a or n < 2:
            raise errors.ConfigError(f"bad ladder {value!r}")
        return np.geomspace(a, b, n).tolist()
    return _floats(value)


def _load_json(value, what: str) -> dict:
    if isinstance(value, dict):
        return value
    text = str(value)
    try:
        if text.lstrip().startswith("{"):
            return json.loads(text)
        with open(text) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise errors.ConfigError(f"cannot read {what} JSON {text!r}: {exc}") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# output -----------------------------------------------------------------------

class Writer:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = Path(cfg.out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: list = []

    def _path(self, name: str) -> Path:
        self.files.append(name)
        return self.dir / name

    def json(self, name: str, doc: dict) -> None:
        body = {**self.cfg.header(), **_jsonable(doc)}
        with open(self._path(name), "w") as fh:
            json.dump(body, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def csv(self, name: str, columns: list, rows) -> None:
        h = self.cfg.header()
        meta = " ".join([f"schema={SCHEMA}", f"command={h['command']}",
                         f"config_hash={h['config_hash']}"]
                        + [f"{k}={v}" for k, v in DEFAULTS.items()])
        with open(self._path(name), "w") as fh:
            fh.write(f"# {meta}\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")

    def text(self, name: str, body: str) -> None:
        with open(self._path(name), "w") as fh:
            fh.write(body + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


# commands ---------------------------------------------------------------------

def _domain(cfg: RunConfig):
    if cfg.domain is None:
        raise errors.ConfigError("this command needs --domain")
    try:
        return domain_from_json(cfg.domain)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, errors.IndicatrixError):
            raise
        raise errors.ConfigError(f"invalid domain JSON: {exc}") from None


def _is_surrogate(spec: dict) -> bool:
    if spec.get("shape") == "assembled":
        return True
    prof = spec.get("profile") or {}
    return spec.get("shape") == "special" and prof.get("kind", "surrogate") in ("surrogate", "lacunary")


def cmd_transform(cfg: RunConfig, w: Writer) -> dict:
    P = cfg.params
    d = _domain(cfg)
    engine = P["engine"]
    if engine == "lemma1":
        if not isinstance(d, Special):
            raise errors.UnsupportedDomainError("the lemma1 engine needs a special domain")
        u, lam = float(P["u"]), float(P["lambda"])
        val = complex(transform(d, [u, lam], "lemma1"))
        ref = complex(transform(d, [u, lam], "boundary")) if (u, lam) != (0.0, 0.0) else complex(d.area)
        diff = abs(val - ref)
        doc = {"engine": "lemma1", "u": u, "lambda": lam, "value": val,
               "cross_check": {"boundary": {"value": ref, "max_err": diff, "tolerance": 1e-8}}}
        w.json("transform.json", doc)
        if diff > 1e-8:
            raise EngineMismatch(f"lemma1 and boundary engines differ by {diff:.3e}")
        return doc
    a, b = _range(P["radial"])
    npts = int(P["points"]) if P.get("points") else int(round(b - a)) + 1
    r = np.linspace(a, b, max(npts, 2))
    xi = np.stack([r, np.zeros_like(r)], -1)
    if engine == "auto":
        engine = "closed" if has_closed_form(d) else "boundary"
    engines = {}
    G = None
    if engine == "grid" or P.get("grid_cross", False):
        G = grid_transform(d, int(P["grid"]))
    for name in ("closed", "boundary", "grid"):
        if name == "closed" and not has_closed_form(d):
            continue
        if name == "grid" and G is None:
            continue
        engines[name] = G.at(xi) if name == "grid" else transform(d, xi, name)
    vals = engines[engine]
    w.csv("spectrum.csv", ["xi1", "xi2", "re", "im", "abs"],
          ([x[0], x[1], v.real, v.imag, abs(v)] for x, v in zip(xi, vals)))
    if G is not None:
        G.to_binary(str(w.dir / "grid"))
        w.files += ["grid.bin", "grid.json"]
    tolerances = {"closed": 1e-10 * max(1.0, d.area), "boundary": 1e-8 * max(1.0, d.area),
                  "grid": G.error if G is not None else None}
    cross = {}
    worst = None
    for name, v in engines.items():
        if name == engine:
            continue
        err = float(np.max(np.abs(v - vals)))
        tol = max(tolerances[name], tolerances[engine])
        cross[name] = {"max_err": err, "tolerance": tol, "agree": err <= tol}
        if err > tol:
            worst = (name, err, tol)
    doc = {"engine": engine, "points": len(r), "area": float(d.area),
           "value_at_zero": complex(vals[np.argmin(np.abs(r))]) if a <= 0 <= b else None,
           "cross_check": cross}
    w.json("transform.json", doc)
    if worst is not None:
        raise EngineMismatch(f"{engine} vs {worst[0]}: {worst[1]:.3e} > {worst[2]:.3e}")
    return doc


def cmd_lp_scan(cfg: RunConfig, w: Writer) -> dict:
    P = cfg.params
    d = _domain(cfg)
    j_range = _range(P["j_range"], int)
    ps = _floats(P["p"])
    out = {"j_range": list(j_range), "angular": int(P["angular"]), "verdicts": {}, "slopes": {}}
    if _is_surrogate(cfg.domain):
        out["flag"] = "surrogate"
        out["exploratory"] = True
    rows = []
    for p in ps:
        rep = dyadic_energies(d, p, j_range, int(P["angular"]), P["engine"])
        try:
            verdict = membership_verdict(rep)
        except errors.InsufficientDataError as exc:
            if not out.get("exploratory"):
                raise
            verdict = "undetermined"
            out.setdefault("notes", {})[f"{p:.6g}"] = str(exc)
        out["verdicts"][f"{p:.6g}"] = verdict
        out["slopes"][f"{p:.6g}"] = {"slope": rep.slope, "ci": list(rep.ci), "residual": rep.residual}
        out["engine"] = rep.engine
        rows += [[p, lv.j, lv.energy, lv.error] for lv in rep.levels]
    w.csv("energies.csv", ["p", "j", "S_j", "err"], rows)
    if P.get("critical"):
        det = critical_exponent_estimate(d, _floats(P["bracket"]), j_range, int(P["angular"]),
                                         P["engine"], return_details=True)
        out["critical"] = det
    w.json("lp_scan.json", out)
    return out


def cmd_sobolev(cfg: RunConfig, w: Writer) -> dict:
    P = cfg.params
    d = _domain(cfg)
    lo, hi = _range(P["ladder"], int)
    rep = sobolev_membership_sweep(d, _floats(P["s"]), range(lo, hi + 1), int(float(P["budget"])),
                                   int(P["seed"]), P.get("T"))
    rows = [[s, e, rep.N[i, j]] for i, s in enumerate(rep.s) for j, e in enumerate(rep.eps)]
    w.csv("sobolev.csv", ["s", "eps", "N"], rows)
    # sigma integrand rows, starting with the trivial t = 0 row
    from .sobolev import sigma_table

    tab = sigma_table(d, float(rep.eps.min()), P.get("T"), int(float(P["budget"])), int(P["seed"]))
    srows = [[0.0, 0.0, 0.0, 0.0]]
    srows += [[r, th, tab.sigma[i, k], tab.stderr[i, k]]
              for i, r in enumerate(tab.r) for k, th in enumerate(tab.theta)]
    w.csv("sigma.csv", ["r", "theta", "sigma", "stderr"], srows)
    doc = rep.summary()
    w.json("sobolev.json", doc)
    return doc


def cmd_minkowski(cfg: RunConfig, w: Writer) -> dict:
    P = cfg.params
    d = _domain(cfg)
    deltas = _ladder(P["deltas"]) if P.get("deltas") else None
    dim, fit = minkowski_dimension(d, deltas, int(P["resolution"]), return_fit=True)
    w.csv("tube_areas.csv", ["delta", "area"], zip(fit["deltas"], fit["areas"]))
    doc = {"dimension": dim, "raw_dimension": fit["raw_dimension"], "slope": fit["slope"],
           "p_bound": remark1_bound(dim), "s_threshold": sobolev_threshold_from_dimension(dim)}
    w.json("minkowski.json", doc)
    return doc


def _flip(m, n: int, ps: list):
    div = [theorem2_diverges(m, n, p) for p in ps]
    for k in range(len(ps) - 1):
        if div[k] and not div[k + 1]:
            a, b = ps[k], ps[k + 1]
            while b - a > 1e-7:
                c = 0.5 * (a + b)
                if theorem2_diverges(m, n, c):
                    a = c
                else:
                    b = c
            return 0.5 * (a + b), div
    return None, div


def cmd_moduli(cfg: RunConfig, w: Writer) -> dict:
    P = cfg.params
    m = modulus_from_json(_load_json(P["modulus"], "modulus"))
    n = int(P["n"])
    ps = sorted(_floats(P["p"]))
    eps = float(P["eps"])
    rows = []
    for p in ps:
        div = theorem2_diverges(m, n, p)
        J = theorem2_integral(m, n, p, eps)
        res = identity6_residual(m, n, p, eps) if p < n else float("nan")
        rows.append([p, J, div, res])
    w.csv("theorem2.csv", ["p", "J_eps", "diverges", "identity6_residual"], rows)
    flip, _ = _flip(m, n, ps)
    doc = {"n": n, "eps": eps, "flip": flip,
           "max_identity6_residual": max(r[3] for r in rows if np.isfinite(r[3])) if rows else None}
    if m.kind in ("power", "power-log"):
        doc["critical_closed_form"] = critical_exponent_power(n, m.alpha)
    chi = ChiMap(m)
    tp = float(P["theta_p"])
    tau, th = theta_p_curve(chi, tp, float(P["theta_y_max"]), points_per_decade=50)
    w.csv("theta.csv", ["tau", "theta_p"], zip(tau, th))
    star = regularize_modulus(m)
    dl = m.dmax / 2 * 2.0 ** -np.arange(0, 31)
    ratio = star(2 * dl) / star(dl)
    w.csv("doubling.csv", ["delta", "omega_star", "ratio_2d"], zip(dl, star(dl), ratio))
    doc["omega_star_doubling"] = doubling_holds(star)
    doc["theta_p"] = tp
    w.json("moduli.json", doc)
    return doc


def _profile(P: dict):
    try:
        return profile_from_json(_load_json(P["profile"], "profile"))
    except (KeyError, TypeError) as exc:
        raise errors.ConfigError(f"invalid profile JSON: {exc}") from None


def cmd_apnorm(cfg: RunConfig, w: Writer) -> dict:
    P = cfg.params
    phi = _profile(P)
    p = float(P["p"])
    curve = growth_fit(phi, p, _ladder(P["ladder"]))
    w.csv("norms.csv", ["lambda", "norm", "p"], ((l, v, p) for l, v in zip(curve.lam, curve.norms)))
    doc = curve.summary()
    if doc["lower_bound_exponent"] is not None:
        doc["lower_bound_respected"] = curve.slope >= doc["lower_bound_exponent"] - 0.05
    if P.get("scan"):
        sc = lemma1_integrand_scan(phi, p, _ladder(P["scan_ladder"]))
        w.csv("lemma1_scan.csv", ["lambda", "integrand"], zip(sc.lam, sc.integrand))
        doc["lemma1_scan"] = sc.summary()
    w.json("apnorm.json", doc)
    return doc


def cmd_construct(cfg: RunConfig, w: Writer) -> dict:
    P = cfg.params
    if P.get("profile"):
        pr = _profile(P)
        spec = {"shape": "assembled", "profile": _load_json(P["profile"], "profile")}
    else:
        mod = {"kind": "power", "alpha": float(P["alpha"])}
        pr = make_surrogate_profile(modulus_from_json(mod), eta=float(P["eta"]))
        spec = {"shape": "assembled", "modulus": mod, "eta": float(P["eta"])}
    dom = build_theorem3_domain(pr, float(P["tol"]))
    junc = junction_mismatches(dom)
    scan = straight_segment_scan(dom)
    w.json("domain.json", {"domain": spec})
    w.json("junctions.json", {"junctions": junc, "tolerance": float(P["tol"]),
                              "passes": all(j["mismatch"] < float(P["tol"]) for j in junc)})
    w.text("boundary.path", svg_path(dom))
    doc = {"max_mismatch": max(j["mismatch"] for j in junc), "straight_scan": scan}
    if P.get("normal_fit", True):
        lo, hi = _range(P["normal_deltas"])
        bs = sample_boundary(dom, float(P["normal_step"]))
        e, C, rms = boundary_normal_exponent(bs, np.geomspace(lo, hi, 9))
        doc["normal_modulus"] = {"exponent": e, "constant": C, "rms": rms}
        if P.get("alpha") is not None and not P.get("profile"):
            doc["normal_modulus"]["matches_alpha"] = abs(e - float(P["alpha"])) <= 0.05
    w.json("construct.json", doc)
    return doc


COMMANDS = {"transform": cmd_transform, "lp-scan": cmd_lp_scan, "sobolev": cmd_sobolev,
            "minkowski": cmd_minkowski, "moduli": cmd_moduli, "apnorm": cmd_apnorm,
            "construct": cmd_construct}


# argument parser --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise errors.ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="indicatrix", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, domain=True):
        if domain:
            p.add_argument("--domain", help="domain JSON file or inline object")
        p.add_argument("--config", help="JSON file of option values (flags override)")
        p.add_argument("--out", default=None, help="output directory (default: current)")

    p = sub.add_parser("transform", help="evaluate 1_D^ along a radial line or at one point")
    common(p)
    p.add_argument("--engine", choices=["auto", "closed", "boundary", "grid", "lemma1"])
    p.add_argument("--radial", help="range 'a..b' of xi_1 values (xi_2 = 0)")
    p.add_argument("--points", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--grid-cross", action="store_true", default=None,
                   help="also cross-check against the grid engine")
    p.add_argument("--u", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)

    p = sub.add_parser("lp-scan", help="dyadic annulus energies and integrability verdicts")
    common(p)
    p.add_argument("--p", help="comma-separated exponents")
    p.add_argument("--j-range")
    p.add_argument("--angular", type=int)
    p.add_argument("--engine", choices=["auto", "closed", "boundary", "grid"])
    p.add_argument("--critical", action="store_true", default=None)
    p.add_argument("--bracket")

    p = sub.add_parser("sobolev", help="difference-norm sweep over s")
    common(p)
    p.add_argument("--s")
    p.add_argument("--ladder", help="range 'k0..k1' of eps = 2^-k")
    p.add_argument("--budget", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--T", type=float)

    p = sub.add_parser("minkowski", help="box-counting dimension of the boundary")
    common(p)
    p.add_argument("--deltas", help="'a..b:n' geometric grid or a list")
    p.add_argument("--resolution", type=int)

    p = sub.add_parser("moduli", help="divergence flip, identity residuals, Theta_p and doubling")
    common(p, domain=False)
    p.add_argument("--modulus", help="modulus JSON file or inline object")
    p.add_argument("--n", type=int)
    p.add_argument("--p")
    p.add_argument("--eps", type=float)
    p.add_argument("--theta-p", type=float)
    p.add_argument("--theta-y-max", type=float)

    p = sub.add_parser("apnorm", help="A_p norms of exp(i lam phi) and their growth")
    common(p, domain=False)
    p.add_argument("--profile", help="periodic profile JSON file or inline object")
    p.add_argument("--p", type=float)
    p.add_argument("--ladder", help="'a..b:n' geometric ladder")
    p.add_argument("--scan", action="store_true", default=None)
    p.add_argument("--scan-ladder")

    p = sub.add_parser("construct", help="square-with-arches domain and its checks")
    common(p, domain=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--profile")
    p.add_argument("--tol", type=float)
    p.add_argument("--normal-fit", dest="normal_fit", action=argparse.BooleanOptionalAction,
                   default=None)
    p.add_argument("--normal-step", type=float)
    p.add_argument("--normal-deltas")
    return ap


COMMAND_DEFAULTS = {
    "transform": {"engine": "auto", "radial": "0..64", "points": None, "grid": DEFAULTS["grid"],
                  "grid_cross": False, "u": None, "lambda": None},
    "lp-scan": {"p": "1.2,1.5", "j_range": "3..12", "angular": DEFAULTS["angular"],
                "engine": "auto", "critical": False, "bracket": "1.1,1.9"},
    "sobolev": {"s": "0.3,0.4,0.5,0.6,0.7", "ladder": "4..12", "budget": 100_000,
                "seed": DEFAULTS["seed"], "T": None},
    "minkowski": {"deltas": None, "resolution": 6},
    "moduli": {"modulus": None, "n": 2, "p": "1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9",
               "eps": 1e-3, "theta_p": 4 / 3, "theta_y_max": 1e4},
    "apnorm": {"profile": {"kind": "cos"}, "p": 4 / 3, "ladder": "1..1000:25", "scan": False,
               "scan_ladder": "1..1000:16"},
    "construct": {"alpha": 0.5, "eta": 0.25, "profile": None, "tol": 1e-6, "normal_fit": True,
                  "normal_step": 2e-5, "normal_deltas": "1e-4..1e-2"},
}


def resolve(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cmd = ns.command
    file_cfg = _load_json(ns.config, "config") if ns.config else {}
    if not isinstance(file_cfg, dict):
        raise errors.ConfigError("config JSON must be an object")
    params = dict(COMMAND_DEFAULTS[cmd])
    unknown = set(file_cfg) - set(params) - {"domain", "out"}
    if unknown:
        raise errors.ConfigError(f"unknown config keys: {sorted(unknown)}")
    params.update({k: v for k, v in file_cfg.items() if k in params})
    for k, v in vars(ns).items():
        if k in params and v is not None:
            params[k] = v
    if cmd == "transform" and params["engine"] == "lemma1":
        if params["u"] is None or params["lambda"] is None:
            raise errors.ConfigError("the lemma1 engine needs --u and --lambda")
    if cmd == "moduli" and params["modulus"] is None:
        raise errors.ConfigError("moduli needs --modulus")
    for key in ("modulus", "profile"):
        if params.get(key) is not None:
            params[key] = _load_json(params[key], key)
    domain = getattr(ns, "domain", None) or file_cfg.get("domain")
    domain = _load_json(domain, "domain") if domain is not None else None
    out = ns.out or file_cfg.get("out") or "."
    return RunConfig(cmd, _jsonable(params), domain, out)


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (EngineMismatch, errors.UnsupportedDomainError, errors.TopologyError,
                        errors.ContainmentError)):
        return EXIT_MISMATCH
    if isinstance(exc, (errors.AccuracyError, errors.NoBracketError, errors.InsufficientDataError,
                        errors.SingularIntegrandError)):
        return EXIT_ACCURACY
    if isinstance(exc, (errors.ArgumentError, errors.ConfigError, errors.ConstructionError,
                        errors.InvariantViolation)):
        return EXIT_CONFIG
    return EXIT_ACCURACY


def _report(exc: BaseException, code: int) -> None:
    doc = {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc), "exit_code": code}
    est = getattr(exc, "estimate", None)
    if est is not None:
        doc["estimate"] = _jsonable(est)
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = resolve(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:
        _report(exc, EXIT_CONFIG)
        return EXIT_CONFIG
    try:
        w = Writer(cfg)
        doc = COMMANDS[cfg.command](cfg, w)
    except Exception as exc:
        code = _exit_code(exc)
        _report(exc, code)
        return code
    summary = {**cfg.header(), "files": w.files, "result": _jsonable(doc),
               "threads": os.environ.get("INDICATRIX_THREADS")}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
