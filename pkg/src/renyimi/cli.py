"""Command-line entry point: ``renyimi <subcommand> [options]``.

Exit codes: 0 ok, 2 bad configuration or input, 3 numerical failure,
4 an inequality that should hold was violated.

Parameters can come from ``--config FILE.json`` (a flat object whose keys
are the subcommand's option names, dashes or underscores) and from flags;
explicit flags win over the file, the file wins over defaults. Unknown keys
are rejected.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import math
import sys
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import area_laws as al
from . import correlations as co
from . import divergences as dv
from . import hamiltonians as hm
from . import ising_chain as ic
from . import pure_states as ps
from . import random_instances as ri
from .io import FormatError, parse_state, read_hamiltonian, read_state
from .linalg import DensityOperator, kron

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VIOLATION = 0, 2, 3, 4
SCHEMA_VERSION = 1
U64_MAX = 2**64 - 1
FIXTURES = ("bell", "mixed4")
HAM_PRESETS = ("classical_ising", "transverse_ising", "heisenberg", "random_local", "random_commuting")
BOUND_NAMES = ("lemma1", "thm1_commuting", "thm2_1d", "thm3_highT")
PINSKER_TOL = 1e-9
CORR_TOL = 1e-8


class ConfigError(ValueError):
    def __init__(self, param: str, msg: str):
        super().__init__(f"{param}: {msg}")
        self.param = param


@dataclass
class Result:
    rows: list[dict]
    columns: list[str]
    extra_header: dict
    violations: int = 0
    summary: str = ""


# ---------------------------------------------------------------- parameter tables
# name -> default; flags are generated from these, so config keys and flags agree

DEFAULTS = {
    "divergence": {
        "rho": None,
        "sigma": None,
        "random_dim": None,
        "random_rank": None,
        "cut": None,
        "family": ["all"],
        "alpha": [2.0],
    },
    "arealaw": {
        "hamiltonian": None,
        "preset": "transverse_ising",
        "sites": 6,
        "J": 1.0,
        "h": 0.5,
        "periodic": False,
        "beta": [0.1, 0.3],
        "cut": ["half"],
        "variant": ["maximal"],
        "alpha": [2.0],
    },
    "ising-sweep": {
        "J_min": -1.0,
        "J_max": 2.0,
        "J_steps": 151,
        "h": [0.0, 0.5, 1.0, 2.0],
        "alpha": [2.0],
        "alpha_min": 0.2,
        "alpha_max": 5.0,
        "alpha_steps": 97,
        "panel_J": 0.6,
        "panel_h": 1.0,
        "oracle_N": None,
        "oracle_L": None,
    },
    "pure-check": {
        "samples": 100,
        "dims": ["2x2", "2x4", "3x3", "4x4"],
        "alpha": [0.3, 0.5, 0.75, 1.25, 1.499, 1.999],
        "thm5_alpha": [0.5, 1.5, 2.0],
        "thm5_samples": 10,
        "thm5_rank": 2,
        "tol": 1e-8,
    },
    "corr-check": {
        "samples": 200,
        "alpha": [2.0],
        "pinsker_alpha": [0.5, 2.0, 5.0],
        "pinsker_samples": 500,
        "thermal_every": 4,
    },
}

COMMON = {"seed": 0, "out": None, "format": "csv"}

_TYPES = {
    "random_dim": int,
    "random_rank": int,
    "sites": int,
    "J_steps": int,
    "alpha_steps": int,
    "oracle_N": int,
    "oracle_L": int,
    "samples": int,
    "thm5_samples": int,
    "thm5_rank": int,
    "pinsker_samples": int,
    "thermal_every": int,
    "seed": int,
}

HELP = {
    "rho": "state file, or builtin:bell / builtin:mixed4",
    "sigma": "second state file; omit to compute the mutual information of --rho",
    "random_dim": "draw random rho, sigma of this dimension instead of reading files",
    "cut": "A-side factors (divergence) or site lists like 0,1,2 / half (arealaw)",
    "family": "divergence families, or 'all'",
    "hamiltonian": "Hamiltonian spec file (overrides --preset)",
    "variant": "mutual-information variants; see renyimi.divergences.MI_VARIANTS",
    "oracle_N": "ring size for the enumeration oracle column (off when omitted)",
}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _add_params(p: argparse.ArgumentParser, table: dict):
    for name, default in table.items():
        kw = {"dest": name, "default": argparse.SUPPRESS, "help": HELP.get(name)}
        if isinstance(default, list):
            kw["nargs"] = "+"
            kw["type"] = float if default and isinstance(default[0], float) else str
        elif isinstance(default, bool):
            kw["action"] = argparse.BooleanOptionalAction
        elif isinstance(default, float):
            kw["type"] = float
        else:
            kw["type"] = _TYPES.get(name, str)
        if name == "cut" and table is DEFAULTS["divergence"]:
            kw["nargs"], kw["type"] = "+", int
        p.add_argument(_flag(name), **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renyimi", description="Renyi divergences, mutual information and area-law checks.")
    parser.add_argument("--version", action="version", version=f"renyimi {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON file with option values")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed (unsigned 64-bit)")
    common.add_argument("--out", type=Path, default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, table in DEFAULTS.items():
        sp = sub.add_parser(name, parents=[common], help=(COMMANDS[name].__doc__ or "").strip().splitlines()[0])
        _add_params(sp, table)
    return parser


def _coerce(name: str, value, default):
    if value is None:
        return None
    try:
        if isinstance(default, list) or (name == "cut"):
            vals = value if isinstance(value, list) else [value]
            if default and isinstance(default[0], float):
                return [float(v) for v in vals]
            return list(vals)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if isinstance(default, float):
            return float(value)
        conv = _TYPES.get(name, str)
        if conv is int and isinstance(value, float) and not value.is_integer():
            raise TypeError
        return conv(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"bad value {value!r}") from None


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    table = {**DEFAULTS[command], **COMMON}
    cfg = dict(table)
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{args.config}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
        for key, val in data.items():
            k = key.replace("-", "_")
            if k not in table:
                raise ConfigError(key, f"unknown key for '{command}' (allowed: {', '.join(sorted(table))})")
            cfg[k] = _coerce(k, val, table[k])
    for k, v in vars(args).items():
        if k in table:
            cfg[k] = v
    if cfg["out"] is not None:
        cfg["out"] = str(cfg["out"])
    return cfg


def config_digest(command: str, cfg: dict) -> str:
    payload = json.dumps({"command": command, **cfg}, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------- validation helpers


def _positive(name, xs, allow_zero=False):
    for x in xs if isinstance(xs, list) else [xs]:
        if not math.isfinite(x) or x < 0 or (x == 0 and not allow_zero):
            raise ConfigError(name, f"must be {'nonnegative' if allow_zero else 'positive'} and finite, got {x!r}")


def _at_least(name, x, lo):
    if x is None or x < lo:
        raise ConfigError(name, f"must be an integer >= {lo}, got {x!r}")


def _load_state(name: str, spec: str) -> DensityOperator:
    if spec.startswith("builtin:"):
        key = spec.split(":", 1)[1]
        if key not in FIXTURES:
            raise ConfigError(name, f"unknown fixture {key!r} (available: {', '.join(FIXTURES)})")
        text = resources.files("renyimi.data").joinpath(f"{key}.state").read_text()
        return parse_state(text, spec)
    if not Path(spec).exists():
        raise ConfigError(name, f"no such file {spec!r}")
    return read_state(spec)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


# ---------------------------------------------------------------- subcommands


def cmd_divergence(cfg: dict, gen: ri.SeededGenerator) -> Result:
    """Divergence table of families x alpha (or mutual information of a single state)."""
    fams = cfg["family"]
    if fams == ["all"] or "all" in fams:
        fams = list(dv.FAMILIES)
    for f in fams:
        if f not in dv.FAMILIES:
            raise ConfigError("family", f"unknown family {f!r} (allowed: all, {', '.join(dv.FAMILIES)})")
    _positive("alpha", cfg["alpha"])
    if cfg["random_dim"] is not None:
        if cfg["rho"] is not None or cfg["sigma"] is not None:
            raise ConfigError("random_dim", "give either state files or --random-dim, not both")
        _at_least("random_dim", cfg["random_dim"], 1)
        rank = cfg["random_rank"]
        if rank is not None and not 1 <= rank <= cfg["random_dim"]:
            raise ConfigError("random_rank", f"must be in [1, {cfg['random_dim']}], got {rank}")
        rho = ri.random_density(cfg["random_dim"], rank, gen.child(0))
        sigma = ri.random_density(cfg["random_dim"], None, gen.child(1))
    else:
        if cfg["rho"] is None:
            raise ConfigError("rho", "a state file (or --random-dim) is required")
        rho = _load_state("rho", cfg["rho"])
        sigma = _load_state("sigma", cfg["sigma"]) if cfg["sigma"] is not None else None
    mode = "divergence"
    if sigma is None:
        mode = "mutual_information"
        cut = cfg["cut"] or [0]
        if len(rho.dims) < 2:
            raise ConfigError("rho", f"mutual information needs at least two factors, dims are {rho.dims}")
        if any(not 0 <= c < len(rho.dims) for c in cut) or len(set(cut)) >= len(rho.dims):
            raise ConfigError("cut", f"{cut} is not a proper subset of factors 0..{len(rho.dims) - 1}")
        rho, sigma, _, _ = dv.split_marginals(rho, cut)
    elif rho.dim != sigma.dim:
        raise ConfigError("sigma", f"dimension {sigma.dim} differs from rho's {rho.dim}")

    rows = []
    for a in cfg["alpha"]:
        row = {"mode": mode, "alpha": a}
        for f in fams:
            if f in ("umegaki", "maximal") or dv._in_range(f, a):
                row[f] = dv.divergence(rho, sigma, f, a, None).value
            else:
                row[f] = None
        rows.append(row)
    return Result(rows, ["mode", "alpha", *fams], {"dim": rho.dim})


def _ham_from_cfg(cfg, gen) -> hm.LatticeHamiltonian:
    if cfg["hamiltonian"] is not None:
        if not Path(cfg["hamiltonian"]).exists():
            raise ConfigError("hamiltonian", f"no such file {cfg['hamiltonian']!r}")
        return read_hamiltonian(cfg["hamiltonian"])
    preset, n = cfg["preset"], cfg["sites"]
    if preset not in HAM_PRESETS:
        raise ConfigError("preset", f"unknown preset {preset!r} (allowed: {', '.join(HAM_PRESETS)})")
    _at_least("sites", n, 2)
    if 2**n > hm.MAX_DENSE_DIM:
        raise ConfigError("sites", f"{n} qubits exceeds the dense limit of {hm.MAX_DENSE_DIM} dimensions")
    for k in ("J", "h"):
        if not math.isfinite(cfg[k]):
            raise ConfigError(k, "must be finite")
    if preset == "random_local":
        return ri.random_local_hamiltonian(n, gen=gen.child(0), periodic=cfg["periodic"])
    if preset == "random_commuting":
        return ri.random_commuting_chain(n, gen=gen.child(0), periodic=cfg["periodic"])
    return hm.PRESETS[preset](n, cfg["J"], cfg["h"], cfg["periodic"])


def _parse_cut(spec: str, n: int) -> list[int]:
    if spec == "half":
        return list(range(n // 2))
    try:
        cut = sorted({int(x) for x in spec.replace(" ", "").split(",") if x})
    except ValueError:
        raise ConfigError("cut", f"bad cut {spec!r}; use 'half' or a comma list like 0,1,2") from None
    if not cut or any(not 0 <= c < n for c in cut) or len(cut) >= n:
        raise ConfigError("cut", f"{spec!r} is not a proper nonempty subset of sites 0..{n - 1}")
    return cut


def cmd_arealaw(cfg: dict, gen: ri.SeededGenerator) -> Result:
    """Thermal mutual information against every applicable area-law bound."""
    _positive("beta", cfg["beta"])
    ham = _ham_from_cfg(cfg, gen)
    cuts = [_parse_cut(str(c), ham.n_sites) for c in cfg["cut"]]
    for v in cfg["variant"]:
        if v not in dv.MI_VARIANTS:
            raise ConfigError("variant", f"unknown variant {v!r} (allowed: {', '.join(dv.MI_VARIANTS)})")
    _positive("alpha", cfg["alpha"])
    for v in cfg["variant"]:
        if v not in ("umegaki", "maximal", "entropy_alpha"):
            for a in cfg["alpha"]:
                try:
                    dv.check_alpha(v, a)
                except dv.AlphaRangeError as exc:
                    raise ConfigError("alpha", str(exc)) from None

    cols = ["beta", "cut", "variant", "alpha", "computed"]
    for b in BOUND_NAMES:
        cols += [f"{b}_applicable", f"{b}_value", f"{b}_margin"]
    cols.append("passed")
    rows, bad = [], 0
    for beta in cfg["beta"]:
        for cut in cuts:
            for v in cfg["variant"]:
                alphas = [None] if v in ("umegaki", "maximal") else cfg["alpha"]
                for a in alphas:
                    cert = al.certify(ham, cut, beta, v, a)
                    row = {
                        "beta": beta,
                        "cut": ",".join(map(str, cut)),
                        "variant": v,
                        "alpha": a,
                        "computed": cert.computed.value,
                    }
                    for b in BOUND_NAMES:
                        try:
                            bd = cert.bound(b)
                        except KeyError:
                            row[f"{b}_applicable"], row[f"{b}_value"], row[f"{b}_margin"] = False, None, None
                            continue
                        row[f"{b}_applicable"] = bd.applicable
                        row[f"{b}_value"] = bd.value if bd.applicable else None
                        row[f"{b}_margin"] = cert.margin(bd) if bd.applicable else None
                    row["passed"] = cert.passed
                    bad += not cert.passed
                    rows.append(row)
    header = {"hamiltonian": ham.name or "custom", "sites": ham.n_sites, "interaction_J": ham.J, "k": ham.k}
    return Result(rows, cols, header, bad, f"arealaw: {len(rows) - bad}/{len(rows)} certificates passed")


def cmd_ising_sweep(cfg: dict, gen: ri.SeededGenerator) -> Result:
    """Classical Ising chain I_alpha over a J grid and an alpha grid."""
    for k in ("J_min", "J_max", "panel_J", "panel_h"):
        if not math.isfinite(cfg[k]):
            raise ConfigError(k, "must be finite")
    if cfg["J_max"] <= cfg["J_min"]:
        raise ConfigError("J_max", "must exceed J_min")
    _at_least("J_steps", cfg["J_steps"], 2)
    _at_least("alpha_steps", cfg["alpha_steps"], 2)
    _positive("alpha", cfg["alpha"])
    _positive("alpha_min", cfg["alpha_min"])
    if cfg["alpha_max"] <= cfg["alpha_min"]:
        raise ConfigError("alpha_max", "must exceed alpha_min")
    oN, oL = cfg["oracle_N"], cfg["oracle_L"]
    if (oN is None) != (oL is None):
        raise ConfigError("oracle_L" if oL is None else "oracle_N", "oracle_N and oracle_L go together")
    if oN is not None:
        if not 3 <= oN <= ic.MAX_ENUM_SITES:
            raise ConfigError("oracle_N", f"must be in [3, {ic.MAX_ENUM_SITES}], got {oN}")
        if not 1 <= oL or 2 * oL >= oN:
            raise ConfigError("oracle_L", f"need 1 <= L and 2L < N, got L={oL}, N={oN}")

    Js = np.linspace(cfg["J_min"], cfg["J_max"], cfg["J_steps"])
    alphas = np.linspace(cfg["alpha_min"], cfg["alpha_max"], cfg["alpha_steps"])
    rows = []
    for r in ic.sweep(Js, cfg["h"], cfg["alpha"], oN, oL):
        rows.append({"panel": "J", **r.__dict__})
    for r in ic.sweep([cfg["panel_J"]], [cfg["panel_h"]], alphas, oN, oL):
        rows.append({"panel": "alpha", **r.__dict__})
    jstar = {}
    for h in cfg["h"]:
        js = ic.sign_change(h, 2.0, J_max=max(cfg["J_max"], 1e-3))
        jstar[f"J_star_alpha2_h={h!r}"] = "none" if js is None else repr(js)
    cols = ["panel", "J", "h", "alpha", "I_alpha_limit", "I_oracle", "N", "L"]
    return Result(rows, cols, jstar)


def _pair_dims(spec: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in spec.lower().split("x"))
    except ValueError:
        raise ConfigError("dims", f"bad dimension pair {spec!r}; use e.g. 2x3") from None
    if a < 1 or b < 1:
        raise ConfigError("dims", f"dimensions must be positive, got {spec!r}")
    return a, b


def cmd_pure_check(cfg: dict, gen: ri.SeededGenerator) -> Result:
    """Pure-state identities, the purification bound and the alpha=3 counterexample."""
    _at_least("samples", cfg["samples"], 1)
    _at_least("thm5_samples", cfg["thm5_samples"], 0)
    _at_least("thm5_rank", cfg["thm5_rank"], 1)
    if cfg["thm5_rank"] > 4:
        raise ConfigError("thm5_rank", "the purification uses 4-dimensional sides, rank must be <= 4")
    _positive("tol", cfg["tol"])
    pairs = [_pair_dims(s) for s in cfg["dims"]]
    for a in cfg["alpha"]:
        if not (0 < a < 1 or 1 < a < 2):
            raise ConfigError("alpha", f"identity alphas must lie in (0,1)u(1,2), got {a!r}")
    for a in cfg["thm5_alpha"]:
        if not (0 < a < 1 or 1 < a):
            raise ConfigError("thm5_alpha", f"must lie in (0,1)u(1,inf), got {a!r}")

    tol = cfg["tol"]
    rows, bad = [], 0

    def add(check, sample, dims, alpha, lhs, rhs, ok):
        nonlocal bad
        bad += not ok
        rows.append({"check": check, "sample": sample, "dims": dims, "alpha": alpha, "lhs": lhs, "rhs": rhs, "passed": ok})

    for pi, (dA, dB) in enumerate(pairs):
        for s in range(cfg["samples"]):
            psi = ri.random_pure(dA, dB, gen=gen.child(0, pi, s))
            for a in cfg["alpha"]:
                lhs, rhs = ps.verify_sandwiched_identity(psi, (dA, dB), a)
                add("sandwiched_identity", s, f"{dA}x{dB}", a, lhs, rhs, abs(lhs - rhs) <= tol)
                if a < 1.5:
                    lhs, rhs = ps.verify_petz_identity(psi, (dA, dB), a)
                    add("petz_identity", s, f"{dA}x{dB}", a, lhs, rhs, abs(lhs - rhs) <= tol)
    r = cfg["thm5_rank"]
    for s in range(cfg["thm5_samples"]):
        psi = ri.random_pure(4, 4, schmidt_rank=r, gen=gen.child(1, s))
        for a in cfg["thm5_alpha"]:
            cert = ps.theorem5_check(psi, (2, 2, 2, 2), r, a)
            b = cert.bounds[0]
            add("thm5_purification", s, "2x2x2x2", a, cert.computed.value, b.value if b.applicable else None, cert.passed)
    eps = 1e-4
    val = ps.epsilon_measured_lower_bound(eps, 3.0)
    rows.append({"check": "epsilon_alpha3", "sample": 0, "dims": "2x2", "alpha": 3.0, "lhs": val, "rhs": 2 * math.log(2), "passed": val > 2 * math.log(2)})
    n = len(rows) - 1
    return Result(rows, ["check", "sample", "dims", "alpha", "lhs", "rhs", "passed"], {"tol": tol}, bad, f"pure-check: {n - bad}/{n} inequalities held")


def _pauli_string(n: int, rng) -> np.ndarray:
    """Random non-identity Pauli string on ``n`` qubits."""
    paulis = (hm.PAULI_I, hm.PAULI_X, hm.PAULI_Y, hm.PAULI_Z)
    while True:
        idx = rng.integers(0, 4, n)
        if idx.any():
            return kron(*(paulis[i] for i in idx))


def cmd_corr_check(cfg: dict, gen: ri.SeededGenerator) -> Result:
    """Binary-measurement Pinsker inequality and the correlation bound."""
    _at_least("samples", cfg["samples"], 0)
    _at_least("pinsker_samples", cfg["pinsker_samples"], 0)
    _at_least("thermal_every", cfg["thermal_every"], 0)
    for name in ("alpha", "pinsker_alpha"):
        for a in cfg[name]:
            if not (0 < a < 1 or 1 < a) or not math.isfinite(a):
                raise ConfigError(name, f"must lie in (0,1)u(1,inf), got {a!r}")

    rows, bad = [], 0

    def add(check, sample, alpha, lhs, rhs):
        nonlocal bad
        ok = lhs >= rhs - (PINSKER_TOL if check == "binary_pinsker" else CORR_TOL)
        bad += not ok
        rows.append({"check": check, "sample": sample, "alpha": alpha, "lhs": lhs, "rhs": rhs, "passed": ok})

    for s in range(cfg["pinsker_samples"]):
        d = (2, 3, 4)[s % 3]
        g = gen.child(0, s)
        rho = ri.random_density(d, gen=g.child(0))
        sigma = ri.random_density(d, gen=g.child(1))
        for a in cfg["pinsker_alpha"]:
            add("binary_pinsker", s, a, *co.binary_pinsker_check(rho, sigma, a))
    chain = hm.transverse_ising_chain(6, 1.0, 0.7)
    H = hm.build_hamiltonian(chain)
    every = cfg["thermal_every"]
    for s in range(cfg["samples"]):
        g = gen.child(1, s)
        if every and s % every == 0:
            rng = g.child(0).rng()
            rho6, _ = hm.gibbs(H, float(rng.uniform(0.1, 2.0)), chain.dims)
            rho = DensityOperator(rho6.matrix, (8, 8))  # sites 0,1,2 | 3,4,5
            pair = co.ObservablePair(_pauli_string(3, rng), _pauli_string(3, rng))
            check = "corr_bound_thermal"
        else:
            rho = ri.random_density(16, gen=g.child(0), dims=(4, 4))
            pair = co.ObservablePair(ri.random_observable(4, g.child(1)), ri.random_observable(4, g.child(2)))
            check = "corr_bound_random"
        for a in cfg["alpha"]:
            add(check, s, a, *co.correlation_bound_check(rho, [0], pair, a))
    n = len(rows)
    return Result(rows, ["check", "sample", "alpha", "lhs", "rhs", "passed"], {}, bad, f"corr-check: {n - bad}/{n} inequalities held")


COMMANDS = {
    "divergence": cmd_divergence,
    "arealaw": cmd_arealaw,
    "ising-sweep": cmd_ising_sweep,
    "pure-check": cmd_pure_check,
    "corr-check": cmd_corr_check,
}


# ---------------------------------------------------------------- output


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else (None if math.isnan(v) else repr(v))  # "inf" / "-inf"
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(res: Result, header: dict, fmt: str) -> str:
    if fmt == "json":
        rows = [{k: _json_value(v) for k, v in r.items()} for r in res.rows]
        return json.dumps({"header": {**header, **res.extra_header}, "columns": res.columns, "rows": rows}, indent=1) + "\n"
    buf = _io.StringIO()
    for k, v in {**header, **res.extra_header}.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(res.columns)
    for r in res.rows:
        w.writerow([_fmt(r.get(c)) for c in res.columns])
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    try:
        cfg = resolve_config(command, args)
        if not 0 <= cfg["seed"] <= U64_MAX:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {cfg['seed']}")
        if cfg["format"] not in ("csv", "json"):
            raise ConfigError("format", f"must be csv or json, got {cfg['format']!r}")
    except ConfigError as exc:
        print(f"renyimi: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    header = {
        "tool": "renyimi",
        "version": __version__,
        "command": command,
        "schema": f"{command}/{SCHEMA_VERSION}",
        "seed": cfg["seed"],
        "rng": ri.ALGORITHM,
        "config_sha256": config_digest(command, cfg),
    }
    gen = ri.SeededGenerator(cfg["seed"])
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", dv.ConvergenceWarning)
            res = COMMANDS[command](cfg, gen)
    except (ConfigError, FormatError, dv.AlphaRangeError, hm.DimensionError, ps.PreconditionError) as exc:
        print(f"renyimi: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError, dv.ConvergenceWarning) as exc:
        print(f"renyimi: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"renyimi: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(res, header, cfg["format"])
    if cfg["out"]:
        try:
            Path(cfg["out"]).write_text(text)
        except OSError as exc:
            print(f"renyimi: cannot write {cfg['out']}: {exc.strerror}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(text)
    if res.summary:
        print(res.summary, file=sys.stderr)
    if res.violations:
        print(f"renyimi: {res.violations} inequality violation(s)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
