"""Command-line surface: scene-config ingestion, sweeps, reports.

Subcommands
-----------
expand    build the expansion at one eps and print a summary
sweep     run an (eps, order) sweep; write residuals.csv, slopes.csv, fields
matrix    print the interaction system, amplitudes, and analytic inverse
validate  run the seeded invariant suite; nonzero exit on failure

Exit codes: 0 ok, 1 validation failure, 2 config error, 3 numerical failure.

Config format: flat key-value sections.  Repeating ``[inclusion]`` blocks add
inclusions; ``source`` lines inside ``[forcing]`` add point sources.

    [domain]
    kind = disk

    [forcing]
    kind = point_sources
    source = -0.5, 0.0, 1.0

    [inclusion]
    shape = ellipse:1,2,2
    base_center = 0.3, 0.0
    offset = 0.0, 0.0
    exponent = 0.0

    [sweep]
    eps = 0.1, 0.05, 0.025, 0.0125
    orders = 0, 1
    out = reports
    seed = 0

Shapes: ``disk``, ``ellipse:a,b,c``, ``laurent:[c-1, c0, c1, ...]`` (inverse
series coefficients), or ``samples:boundary.csv`` (two columns x,y per row,
no header, path relative to the config file).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checks
from .boundary import angles
from .conformal import InteriorMap, ShapeSpec
from .errors import ConfigError, SmallHolesError
from .expansion import expand
from .interactions import asymptotic_inverse
from .reference import remainder_norm, solve_reference
from .scenes import Forcing, Inclusion, Scene


# ---------------------------------------------------------------------------
# config parsing


@dataclass
class SweepPlan:
    eps_values: tuple
    orders: tuple
    out_dir: Path
    seed: int = 0


@dataclass
class _RawSection:
    name: str
    line: int
    entries: list = field(default_factory=list)  # (line, key, value)


def _split_sections(text: str):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = _RawSection(name=line[1:-1].strip().lower(), line=lineno)
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: entry before any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        current.entries.append((lineno, key.lower(), value))
    return sections


def _pair(value: str, lineno: int) -> complex:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"line {lineno}: expected 'x, y', got {value!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {exc}") from exc


def _floats(value: str, lineno: int):
    try:
        return tuple(float(p) for p in value.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {exc}") from exc


def parse_shape(text: str, base_dir: Path, lineno: int) -> ShapeSpec:
    text = text.strip()
    if text == "disk":
        return ShapeSpec.disk()
    if text.startswith("ellipse:"):
        params = _floats(text[len("ellipse:"):], lineno)
        if len(params) != 3:
            raise ConfigError(f"line {lineno}: ellipse needs three parameters a,b,c")
        return ShapeSpec.from_ellipse(*params)
    if text.startswith("laurent:"):
        body = text[len("laurent:"):].strip()
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        try:
            coeffs = [complex(tok.strip().replace(" ", "")) for tok in body.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad laurent coefficient ({exc})") from exc
        return ShapeSpec.from_laurent(coeffs)
    if text.startswith("samples:"):
        path = base_dir / text[len("samples:"):].strip()
        if not path.exists():
            raise ConfigError(f"line {lineno}: samples file {path} not found")
        pts = np.loadtxt(path, delimiter=",", dtype=float)
        return ShapeSpec.from_samples(pts)
    raise ConfigError(f"line {lineno}: unknown shape {text!r}")


def parse_scene(path) -> tuple[Scene, SweepPlan]:
    """Parse and validate a scene configuration file.

    The scene is built and geometry-validated at the largest sweep eps.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} not found")
    sections = _split_sections(path.read_text())

    domain = InteriorMap.unit_disk()
    forcing_kind, forcing_value, sources = "zero", 0.0, []
    inclusions = []
    eps_values: tuple = ()
    orders: tuple = (0, 1)
    out_dir = Path("reports")
    seed = 0

    for sec in sections:
        entries = dict()
        for lineno, key, value in sec.entries:
            if sec.name == "forcing" and key == "source":
                vals = _floats(value, lineno)
                if len(vals) != 3:
                    raise ConfigError(f"line {lineno}: source needs x, y, charge")
                sources.append((complex(vals[0], vals[1]), vals[2]))
                continue
            entries[key] = (lineno, value)

        if sec.name == "domain":
            lineno, kind = entries.get("kind", (sec.line, "disk"))
            if kind != "disk":
                raise ConfigError(
                    f"line {lineno}: only 'disk' domains are configurable; other outer "
                    "domains need a user-supplied series through the library API")
        elif sec.name == "forcing":
            lineno, forcing_kind = entries.get("kind", (sec.line, "zero"))
            if forcing_kind not in ("zero", "constant", "point_sources"):
                raise ConfigError(f"line {lineno}: unknown forcing kind {forcing_kind!r}")
            if "value" in entries:
                lineno, val = entries["value"]
                forcing_value = _floats(val, lineno)[0]
        elif sec.name == "inclusion":
            if "shape" not in entries:
                raise ConfigError(f"line {sec.line}: inclusion needs a shape")
            lineno, shape_text = entries["shape"]
            shape = parse_shape(shape_text, path.parent, lineno)
            lineno_b, base_text = entries.get("base_center", (sec.line, "0, 0"))
            base = _pair(base_text, lineno_b)
            lineno_o, off_text = entries.get("offset", (sec.line, "0, 0"))
            offset = _pair(off_text, lineno_o)
            lineno_e, exp_text = entries.get("exponent", (sec.line, "0"))
            try:
                exponent = float(exp_text)
            except ValueError as exc:
                raise ConfigError(f"line {lineno_e}: {exc}") from exc
            if not 0.0 <= exponent < 1.0:
                raise ConfigError(
                    f"line {lineno_e}: exponent must lie in [0, 1), got {exponent}")
            try:
                inclusions.append(Inclusion.build(shape, base, offset, exponent))
            except SmallHolesError as exc:
                raise ConfigError(f"line {sec.line}: {exc}") from exc
        elif sec.name == "sweep":
            if "eps" in entries:
                lineno, val = entries["eps"]
                eps_values = _floats(val, lineno)
            if "orders" in entries:
                lineno, val = entries["orders"]
                try:
                    orders = tuple(int(p) for p in val.split(",") if p.strip())
                except ValueError as exc:
                    raise ConfigError(f"line {lineno}: {exc}") from exc
                if any(o < 0 for o in orders):
                    raise ConfigError(f"line {lineno}: orders must be >= 0")
            if "out" in entries:
                out_dir = path.parent / entries["out"][1]
            if "seed" in entries:
                lineno, val = entries["seed"]
                try:
                    seed = int(val)
                except ValueError as exc:
                    raise ConfigError(f"line {lineno}: {exc}") from exc
        else:
            raise ConfigError(f"line {sec.line}: unknown section [{sec.name}]")

    if eps_values and any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ConfigError("sweep eps values must be strictly decreasing")
    if not inclusions:
        raise ConfigError("at least one [inclusion] section is required")

    forcing = Forcing(kind=forcing_kind, value=forcing_value, sources=tuple(sources))
    eps0 = eps_values[0] if eps_values else 0.05
    try:
        scene = Scene(domain=domain, inclusions=tuple(inclusions), forcing=forcing, eps=eps0)
        for eps in eps_values[1:]:
            scene.at(eps)  # geometry must hold at every requested size
    except SmallHolesError as exc:
        raise ConfigError(str(exc)) from exc
    plan = SweepPlan(eps_values=eps_values or (eps0,), orders=orders,
                     out_dir=out_dir, seed=seed)
    return scene, plan


# ---------------------------------------------------------------------------
# report emission


def _fmt(x) -> str:
    return f"{x:.17e}"


def _sweep_row(scene: Scene, eps: float, order: int, reference=None):
    """One sweep row: expansion at (eps, order) measured against the reference."""
    sc = scene.at(eps)
    e = expand(sc, order)
    res = e.boundary_residuals()
    if reference is None:
        reference = solve_reference(sc)
    rep = remainder_norm(reference, e)
    n = sc.n_inclusions
    amps = e.amplitudes if e.order else np.zeros(n)
    fars = e.far_constants if e.order else np.zeros(n)
    scales = [p.log_scale for p in e.profiles]
    cond = e.matrix.condition if e.matrix is not None else (1.0 if n == 1 else np.nan)
    row = {
        "eps": eps, "order": order, "status": "ok",
        "res_outer": res.outer,
        **{f"res_hole_{i+1}": res.holes[i] for i in range(n)},
        "interior_sup": rep.sup, "interior_rms": rep.rms,
        **{f"amplitude_{i+1}": amps[i] for i in range(n)},
        **{f"far_constant_{i+1}": fars[i] for i in range(n)},
        **{f"log_scale_{i+1}": scales[i] for i in range(n)},
        "matrix_cond": cond,
    }
    return row, reference, rep


def _row_schema(n: int):
    cols = ["eps", "order", "status", "res_outer"]
    cols += [f"res_hole_{i+1}" for i in range(n)]
    cols += ["interior_sup", "interior_rms"]
    cols += [f"amplitude_{i+1}" for i in range(n)]
    cols += [f"far_constant_{i+1}" for i in range(n)]
    cols += [f"log_scale_{i+1}" for i in range(n)]
    cols += ["matrix_cond"]
    return cols


def run_sweep(scene: Scene, plan: SweepPlan, write_fields: bool = True) -> Path:
    """Run the sweep and emit residuals.csv, slopes.csv, fields_<eps>.csv."""
    out = plan.out_dir
    out.mkdir(parents=True, exist_ok=True)
    n = scene.n_inclusions
    cols = _row_schema(n)
    rows = []
    for eps in plan.eps_values:
        reference = None
        for order in plan.orders:
            try:
                row, reference, rep = _sweep_row(scene, eps, order, reference)
            except SmallHolesError as exc:
                row = {"eps": eps, "order": order,
                       "status": f"error:{type(exc).__name__}"}
                rep = None
            rows.append(row)
            if write_fields and rep is not None and order == max(plan.orders):
                with open(out / f"fields_{eps:g}.csv", "w") as fh:
                    fh.write("x,y,u_ref,u_exp,diff\n")
                    for p, ur, ue in zip(rep.points, rep.values_reference,
                                         rep.values_expansion):
                        fh.write(f"{_fmt(p.real)},{_fmt(p.imag)},{_fmt(ur)},"
                                 f"{_fmt(ue)},{_fmt(ur - ue)}\n")

    with open(out / "residuals.csv", "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            vals = []
            for c in cols:
                v = row.get(c, np.nan)
                if c == "status":
                    vals.append(str(v))
                elif c == "order":
                    vals.append(str(int(v)))
                else:
                    vals.append(_fmt(float(v)))
            fh.write(",".join(vals) + "\n")

    with open(out / "slopes.csv", "w") as fh:
        fh.write("order,metric,slope,intercept\n")
        for order in plan.orders:
            sel = [r for r in rows if r["order"] == order and r["status"] == "ok"]
            if len(sel) < 2:
                continue
            eps_arr = np.array([r["eps"] for r in sel])
            for metric in ("interior_sup", "res_outer",
                           *(f"res_hole_{i+1}" for i in range(n))):
                vals = np.array([r[metric] for r in sel])
                if np.any(vals <= 0):
                    continue
                slope, intercept = np.polyfit(np.log(eps_arr), np.log(vals), 1)
                fh.write(f"{order},{metric},{_fmt(slope)},{_fmt(intercept)}\n")
    return out


# ---------------------------------------------------------------------------
# subcommands


def _cmd_expand(args) -> int:
    scene, plan = parse_scene(args.config)
    eps = args.eps[0] if args.eps else plan.eps_values[0]
    order = max(args.orders) if args.orders else max(plan.orders)
    sc = scene.at(eps)
    e = expand(sc, order)
    res = e.boundary_residuals()
    print(f"scene: {sc.n_inclusions} inclusion(s), regime {sc.regime().kind}, "
          f"eps={eps:g}, order={order}")
    print(f"boundary residual outer: {res.outer:.6e}")
    for i, h in enumerate(res.holes):
        print(f"boundary residual hole {i+1}: {h:.6e}")
    if e.order:
        for i, (a, f0, p) in enumerate(zip(e.amplitudes, e.far_constants, e.profiles)):
            print(f"inclusion {i+1}: amplitude={a:.6e} far_constant={f0:.6e} "
                  f"log_scale={p.log_scale:.6e}")
    if e.matrix is not None:
        print(f"interaction matrix condition: {e.matrix.condition:.3e}")
    return 0


def _cmd_sweep(args) -> int:
    scene, plan = parse_scene(args.config)
    if args.eps:
        plan.eps_values = tuple(args.eps)
    if args.orders:
        plan.orders = tuple(args.orders)
    if args.out:
        plan.out_dir = Path(args.out)
    if args.seed is not None:
        plan.seed = args.seed
    out = run_sweep(scene, plan)
    print(f"wrote {out / 'residuals.csv'}")
    print(f"wrote {out / 'slopes.csv'}")
    return 0


def _cmd_matrix(args) -> int:
    scene, plan = parse_scene(args.config)
    eps = args.eps[0] if args.eps else plan.eps_values[0]
    sc = scene.at(eps)
    e = expand(sc, 1)
    if e.matrix is None:
        from .interactions import InteractionMatrix
        from .scenes import Regime
        m = InteractionMatrix(entries=[[-e.profiles[0].denominator]],
                              rhs=e.far_constants, regime=Regime(kind="single"),
                              log_eps=float(np.log(eps)))
        m.solve()
    else:
        m = e.matrix
    np.set_printoptions(precision=12, suppress=False, linewidth=120)
    print(f"regime: {m.regime.kind} (alpha={m.regime.alpha:g}, beta={m.regime.beta:g})")
    print("interaction matrix:")
    print(m.entries)
    print("right-hand side:", m.rhs)
    print("amplitudes:", m.amplitudes)
    print(f"condition number: {m.condition:.6e}")
    if m.regime.kind not in ("general",):
        inv = asymptotic_inverse(m)
        print("analytic leading inverse:")
        print(inv.matrix)
        print(f"deviation from exact inverse: {inv.deviation:.6e}")
        print(f"deviation * ln(eps)^2: {inv.scaled_deviation:.6e}")
    return 0


def _cmd_validate(args) -> int:
    results = checks.run_all(seed=args.seed if args.seed is not None else 0,
                             corrupt=args.corrupt)
    print(checks.format_report(results))
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="smallholes",
        description="Asymptotic expansions for the Dirichlet-Laplace problem "
                    "in a domain with small inclusions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="scene config file")
        p.add_argument("--eps", type=float, nargs="+", help="override sweep eps values")
        p.add_argument("--orders", type=int, nargs="+", help="override expansion orders")
        p.add_argument("--out", help="override output directory")
        p.add_argument("--seed", type=int, help="seed for randomized checks")

    common(sub.add_parser("expand", help="one expansion, printed summary"))
    common(sub.add_parser("sweep", help="run the sweep and write CSV reports"))
    common(sub.add_parser("matrix", help="print the interaction system"))
    pv = sub.add_parser("validate", help="run the invariant suite")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)

    args = parser.parse_args(argv)
    handlers = {"expand": _cmd_expand, "sweep": _cmd_sweep,
                "matrix": _cmd_matrix, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SmallHolesError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
