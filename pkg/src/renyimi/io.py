"""Plain-text state and Hamiltonian formats.

State file::

    dims: 2 2
    # row-major complex entries as "re im" pairs, any line layout
    0.5 0  0 0  0 0  0.5 0
    ...

Hamiltonian spec::

    # key = value lines, then term blocks
    local_dim = 2
    sites = 6              # open chain 0..5
    grid = 3 3             # or a rows x cols grid instead of sites
    periodic = false
    preset = transverse_ising   # optional: classical_ising | transverse_ising | heisenberg
    J = 1.0
    h = 0.5
    term: 0 1              # support sites, then d^(2|supp|) "re im" pairs, row-major
    1 0  0 0  0 0  0 0
    ...

Presets and explicit terms may be combined; the terms are added to the preset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hamiltonians import (
    PRESETS,
    LatticeHamiltonian,
    LocalTerm,
    grid_ising,
)
from .linalg import DensityOperator, NotAStateError, NotHermitianError


class FormatError(ValueError):
    """Malformed input file; the message names the line and field."""


def _tokens(text: str):
    """Yield ``(line_no, token)`` skipping comments and blank lines."""
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        for tok in line.split():
            yield no, tok


def _float(tok: str, no: int, source: str, what: str) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise FormatError(f"{source}: line {no}: {what}: cannot parse {tok!r} as a number") from None
    if not math.isfinite(x):
        raise FormatError(f"{source}: line {no}: {what}: non-finite value {tok!r}")
    return x


def parse_state(text: str, source: str = "<state>") -> DensityOperator:
    lines = text.splitlines()
    head_no, head = next(((i + 1, l) for i, l in enumerate(lines) if l.split("#", 1)[0].strip()), (0, ""))
    if not head.strip().startswith("dims:"):
        raise FormatError(f"{source}: line {head_no}: expected a 'dims: d1 d2 ...' header")
    try:
        dims = tuple(int(x) for x in head.split("#", 1)[0].split(":", 1)[1].split())
    except ValueError:
        raise FormatError(f"{source}: line {head_no}: dims must be positive integers") from None
    if not dims or any(d < 1 for d in dims):
        raise FormatError(f"{source}: line {head_no}: dims must be positive integers, got {dims}")
    D = math.prod(dims)
    body = "\n" * head_no + "\n".join(lines[head_no:])
    vals, last = [], head_no
    for no, tok in _tokens(body):
        vals.append(_float(tok, no, source, f"entry {len(vals) // 2}"))
        last = no
    if len(vals) != 2 * D * D:
        raise FormatError(
            f"{source}: line {last}: expected {D * D} complex entries ({2 * D * D} numbers) "
            f"for dims {dims}, found {len(vals)} numbers"
        )
    arr = np.asarray(vals).reshape(D * D, 2)
    M = (arr[:, 0] + 1j * arr[:, 1]).reshape(D, D)
    try:
        return DensityOperator(M, dims)
    except (NotAStateError, NotHermitianError) as exc:
        raise FormatError(f"{source}: not a density operator: {exc}") from None


def read_state(path) -> DensityOperator:
    p = Path(path)
    return parse_state(p.read_text(), str(p))


def format_state(rho: DensityOperator) -> str:
    out = ["dims: " + " ".join(str(d) for d in rho.dims)]
    for row in rho.matrix:
        out.append("  ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    return "\n".join(out) + "\n"


def write_state(rho: DensityOperator, path) -> None:
    Path(path).write_text(format_state(rho))


@dataclass
class _Block:
    support: tuple[int, ...]
    line: int
    values: list


def _parse_bool(s: str) -> bool:
    v = s.lower()
    if v not in ("true", "false"):
        raise ValueError(s)
    return v == "true"


_KEYS = {"local_dim", "sites", "grid", "periodic", "preset", "J", "h"}


def parse_hamiltonian(text: str, source: str = "<hamiltonian>") -> LatticeHamiltonian:
    cfg: dict[str, tuple[str, int]] = {}
    blocks: list[_Block] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("term:"):
            try:
                support = tuple(int(x) for x in line[5:].split())
            except ValueError:
                raise FormatError(f"{source}: line {no}: term support must be integers") from None
            if not support:
                raise FormatError(f"{source}: line {no}: empty term support")
            blocks.append(_Block(support, no, []))
        elif "=" in line and not blocks:
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in _KEYS:
                raise FormatError(f"{source}: line {no}: unknown key {key!r} (allowed: {sorted(_KEYS)})")
            cfg[key] = (val, no)
        elif blocks:
            for tok in line.split():
                blocks[-1].values.append(_float(tok, no, source, f"term on {blocks[-1].support}"))
        else:
            raise FormatError(f"{source}: line {no}: expected 'key = value' or 'term: ...', got {line!r}")

    def get(key, conv, default=None):
        if key not in cfg:
            return default
        val, no = cfg[key]
        try:
            return conv(val)
        except ValueError:
            raise FormatError(f"{source}: line {no}: bad value {val!r} for {key}") from None

    d = get("local_dim", int, 2)
    periodic = get("periodic", _parse_bool, False)
    grid = get("grid", lambda s: tuple(int(x) for x in s.split()))
    n = get("sites", int)
    preset = get("preset", str)
    J = get("J", float, 1.0)
    h = get("h", float, 0.0)
    if grid is not None and n is not None:
        raise FormatError(f"{source}: give either 'sites' or 'grid', not both")
    if grid is not None and len(grid) != 2:
        raise FormatError(f"{source}: line {cfg['grid'][1]}: grid needs two integers")
    if grid is None and n is None:
        raise FormatError(f"{source}: missing 'sites' or 'grid'")

    base_terms: tuple = ()
    if preset is not None:
        if d != 2:
            raise FormatError(f"{source}: presets are qubit models, local_dim must be 2")
        if grid is not None:
            if preset != "transverse_ising":
                raise FormatError(f"{source}: grid presets support only transverse_ising")
            base = grid_ising(grid[0], grid[1], J, h)
        elif preset in PRESETS:
            base = PRESETS[preset](n, J, h, periodic)
        else:
            raise FormatError(f"{source}: line {cfg['preset'][1]}: unknown preset {preset!r} (allowed: {sorted(PRESETS)})")
        base_terms = base.terms
        coords = base.coords
    elif grid is not None:
        coords = tuple((r, c) for r in range(grid[0]) for c in range(grid[1]))
    else:
        coords = tuple((i,) for i in range(n))

    terms = list(base_terms)
    for b in blocks:
        m = d ** len(b.support)
        if len(b.values) != 2 * m * m:
            raise FormatError(
                f"{source}: line {b.line}: term on {b.support} needs {m * m} complex entries, got {len(b.values) / 2:g}"
            )
        arr = np.asarray(b.values).reshape(m * m, 2)
        M = (arr[:, 0] + 1j * arr[:, 1]).reshape(m, m)
        try:
            terms.append(LocalTerm(b.support, M))
        except (ValueError, NotHermitianError) as exc:
            raise FormatError(f"{source}: line {b.line}: {exc}") from None
    try:
        return LatticeHamiltonian(coords, d, tuple(terms), bool(periodic), preset or "custom")
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{source}: {exc}") from None


def read_hamiltonian(path) -> LatticeHamiltonian:
    p = Path(path)
    return parse_hamiltonian(p.read_text(), str(p))
