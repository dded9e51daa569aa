"""Command-line front end: reports as JSON (canonical) or TSV."""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import _kernels
from . import boundary as bd
from . import criteria as cr
from . import divergence as dv
from . import hyperbolicity as hy
from .core import Digraph, ParseError, dump_digraph, load_digraph
from .extnat import INF, to_json
from .families import CATALOG, FamilySpec, list_families, rays, realize
from .rewriting import BUILTIN_PRESENTATIONS, RewriteBudgetExceeded

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageProblem(click.ClickException):
    exit_code = EXIT_USAGE


def _parse_value(text: str):
    for conv in (int, Fraction):
        try:
            return conv(text)
        except (ValueError, ZeroDivisionError):
            pass
    return text


def _params(pairs) -> dict:
    out = {}
    for p in pairs:
        if "=" not in p:
            raise UsageProblem(f"--param expects k=v, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = _parse_value(v.strip())
    return out


def _set_workers(workers: int | None) -> None:
    if workers is None:
        env = os.environ.get("DIRHYP_WORKERS")
        workers = int(env) if env else None
    if workers is None or not _kernels.USE_NUMBA:
        return
    import numba

    numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))


def _family_spec(family: str, params: dict, presentation: str | None) -> FamilySpec:
    params = dict(params)
    if presentation is not None:
        path = Path(presentation)
        params["presentation"] = path.read_text() if path.is_file() else presentation
    try:
        return FamilySpec(family, params)
    except (KeyError, ValueError) as exc:
        raise UsageProblem(str(exc)) from None


def _load(input_path: str | None, family: str | None, params: dict, n: int,
          presentation: str | None):
    """(digraph, spec or None, source description)."""
    if (input_path is None) == (family is None):
        raise UsageProblem("give exactly one of an input file or --family")
    if input_path is not None:
        try:
            text = sys.stdin.read() if input_path == "-" else Path(input_path).read_text()
            return load_digraph(text), None, {"file": input_path}
        except OSError as exc:
            raise UsageProblem(f"cannot read {input_path}: {exc.strerror}") from None
        except ParseError as exc:
            raise UsageProblem(f"parse error: {exc}") from None
    spec = _family_spec(family, params, presentation)
    try:
        real = realize(spec, n)
    except (ValueError, KeyError, RewriteBudgetExceeded) as exc:
        raise UsageProblem(str(exc)) from None
    return real.digraph, spec, {"family": family, "params": _jsonable(spec.params), "n": n}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is INF or isinstance(obj, Fraction):
        return to_json(obj)
    return obj


def _flatten(prefix: str, obj, rows: list) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], rows)
    elif isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}.{i}", v, rows)
    else:
        rows.append((prefix, json.dumps(obj, sort_keys=True) if isinstance(obj, (list, dict))
                     else str(obj)))


def _emit(report: dict, fmt: str) -> None:
    report = _jsonable(report)
    if fmt == "json":
        click.echo(json.dumps(report, sort_keys=True, indent=2))
    else:
        rows: list = []
        _flatten("", report, rows)
        for k, v in rows:
            click.echo(f"{k}\t{v}")


def input_options(f):
    f = click.option("--format", "fmt", type=click.Choice(["json", "tsv"]), default="json",
                     show_default=True)(f)
    f = click.option("--workers", type=int, default=None,
                     help="Kernel threads (default: $DIRHYP_WORKERS or all cores).")(f)
    f = click.option("--presentation", default=None,
                     help="Built-in presentation name or presentation file.")(f)
    f = click.option("--n", "n", type=int, default=6, show_default=True,
                     help="Truncation size for families.")(f)
    f = click.option("--param", "param", multiple=True, help="Family parameter k=v.")(f)
    f = click.option("--family", default=None, help="Built-in family name.")(f)
    f = click.argument("input_path", required=False)(f)
    return f


@click.group()
def main():
    """Hyperbolicity and boundary analysis for digraphs."""


@main.command()
@input_options
@click.option("--cap", type=int, default=10_000, show_default=True,
              help="Geodesics kept per ordered pair.")
@click.option("--r-max", type=int, default=6, show_default=True,
              help="Largest radius for the bound profiles.")
def analyze(input_path, family, param, n, presentation, workers, fmt, cap, r_max):
    """delta, zero-hyperbolicity, bound profiles and named constants."""
    _set_workers(workers)
    D, spec, source = _load(input_path, family, _params(param), n, presentation)
    store = hy.GeodesicStore(D, cap=cap)
    results = {}
    for kind in ("thin", "slim"):
        for mode in ("all", "transitive"):
            results[f"{kind}_{mode}"] = hy.delta(D, kind, mode, cap, store).to_record(D)
    zero, wit = hy.is_zero_hyperbolic(D)
    f_out = hy.bound_profile(D, "out", r_max)
    f_in = hy.bound_profile(D, "in", r_max)
    d = hy.delta(D, "thin", "all", cap, store).delta
    f_const = f_out if int(d) + 1 <= r_max else hy.bound_profile(D, "out", int(d) + 1)
    try:
        consts = hy.named_constants(d, f_const).to_record()
    except ValueError as exc:
        consts = {"unavailable": str(exc)}
    report = {
        "config": {"command": "analyze", "source": source, "cap": cap, "r_max": r_max},
        "vertices": D.n, "edges": len(D.edges), "backend": _kernels.backend_name(),
        "delta": results,
        "zero_hyperbolic": {"value": zero,
                            "witness": [w.labelled(D) for w in wit] if wit else None},
        "bound_profile": {"out": f_out.to_record(), "in": f_in.to_record()},
        "constants": consts,
    }
    _emit(report, fmt)


@main.command()
@input_options
@click.option("--r", "r_grid", default="0,1,2,3,4,5,6", show_default=True)
@click.option("--e0", default=None, help="Override the premise threshold.")
@click.option("--k", "k_value", default=None, help="Override the exponent constant.")
def diverge(input_path, family, param, n, presentation, workers, fmt, r_grid, e0, k_value):
    """Check e(r) = 2^((r - 2 delta - 1)/k) - 1 against every escaping path."""
    _set_workers(workers)
    D, spec, source = _load(input_path, family, _params(param), n, presentation)
    d = hy.delta(D).delta
    f = hy.bound_profile(D, "out", int(d) + 2)
    consts = hy.named_constants(d, f)
    e0v = Fraction(e0) if e0 is not None else consts.divergence_e0
    kv = Fraction(k_value) if k_value is not None else consts.divergence_k
    grid = [int(v) for v in r_grid.split(",")]
    scan = dv.scan_divergence(D, d, e0v, kv, grid)
    report = {"config": {"command": "diverge", "source": source, "r": grid,
                         "e0": to_json(e0v), "k": to_json(kv)},
              **scan.to_record(D)}
    _emit(report, fmt)
    sys.exit(EXIT_OK if scan.ok else EXIT_FAIL)


@main.command()
@input_options
@click.option("--x", "x_label", required=True)
@click.option("--y", "y_label", required=True)
@click.option("--gamma", default="1", show_default=True)
@click.option("--c", "c_value", default="0", show_default=True)
@click.option("--cap", type=int, default=10_000, show_default=True)
def stability(input_path, family, param, n, presentation, workers, fmt, x_label, y_label,
              gamma, c_value, cap):
    """Largest distance between two (gamma, c)-quasi-geodesics with the same ends."""
    D, spec, source = _load(input_path, family, _params(param), n, presentation)
    try:
        x, y = D.index(x_label), D.index(y_label)
        rep = dv.stability_defect(D, x, y, Fraction(gamma), Fraction(c_value), cap)
    except (KeyError, ValueError) as exc:
        raise UsageProblem(str(exc)) from None
    _emit({"config": {"command": "stability", "source": source, "x": x_label, "y": y_label,
                      "gamma": gamma, "c": c_value, "cap": cap},
           **rep.to_record(D)}, fmt)


@main.command()
@click.argument("first", type=click.Path(exists=True, dir_okay=False))
@click.argument("second", type=click.Path(exists=True, dir_okay=False))
@click.option("--map", "map_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Lines 'label1 label2'; default matches equal labels.")
@click.option("--gamma", default=None)
@click.option("--c", "c_value", default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "tsv"]), default="json")
def qi(first, second, map_path, gamma, c_value, fmt):
    """Check a map between two digraphs for quasi-isometry constants.

    Without --gamma and --c, a grid of small constants is searched.
    """
    try:
        D1 = load_digraph(Path(first).read_text())
        D2 = load_digraph(Path(second).read_text())
        if map_path:
            pairs = [ln.split() for ln in Path(map_path).read_text().splitlines() if ln.strip()]
            lookup = {a: b for a, b in pairs}
            mapping = [D2.index(lookup[lab]) for lab in D1.labels]
        else:
            mapping = [D2.index(lab) for lab in D1.labels]
    except (ParseError, KeyError, ValueError) as exc:
        raise UsageProblem(str(exc)) from None
    config = {"command": "qi", "first": first, "second": second, "map": map_path}
    if gamma is not None and c_value is not None:
        res = dv.qi_check(mapping, D1, D2, Fraction(gamma), Fraction(c_value))
        _emit({"config": {**config, "gamma": gamma, "c": c_value}, **res.to_record()}, fmt)
        sys.exit(EXIT_OK if res.ok else EXIT_FAIL)
    grid_g = [1, Fraction(3, 2), 2, 3, 4]
    grid_c = [0, 1, 2, 3, 4]
    best, passing = dv.qi_minimal(mapping, D1, D2, grid_g, grid_c)
    _emit({"config": {**config, "grid_gamma": grid_g, "grid_c": grid_c},
           "least": list(best) if best else None,
           "passing": [list(p) for p in passing]}, fmt)
    sys.exit(EXIT_OK if best else EXIT_FAIL)


@main.command()
@click.option("--family", required=True)
@click.option("--param", "param", multiple=True)
@click.option("--presentation", default=None)
@click.option("--n", "n", type=int, default=20, show_default=True)
@click.option("--m-cap", type=int, default=4, show_default=True)
@click.option("--r-probe", default="0,1,2,3,4", show_default=True)
@click.option("--base", "base_set", multiple=True, help="Base vertex label for rho (repeatable).")
@click.option("--window", "windows", multiple=True, default=("5,10", "10,20"),
              show_default=True)
@click.option("--proxy", default="2", show_default=True,
              help="Rational base b for the weights b^(-rho).")
@click.option("--workers", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "tsv"]), default="json")
def boundary(family, param, presentation, n, m_cap, r_probe, base_set, windows, proxy,
             workers, fmt):
    """Boundary classes, ends, the refinement map and optional rho matrices."""
    _set_workers(workers)
    spec = _family_spec(family, _params(param), presentation)
    specs = rays(spec)
    if not specs:
        raise UsageProblem(f"family {family!r} has no designated rays")
    grid = tuple(int(v) for v in r_probe.split(","))
    try:
        bp = bd.boundary_partition(spec, n, m_cap, grid)
        ends = bd.ends_partition(spec, n)
        ref = bd.refinement_map(spec, n, m_cap, grid)
    except ValueError as exc:
        raise UsageProblem(str(exc)) from None
    report = {"config": {"command": "boundary", "family": family,
                         "params": _jsonable(spec.params), "n": n, "M_cap": m_cap,
                         "r_probe": list(grid), "base": list(base_set),
                         "windows": list(windows), "proxy": proxy},
              "boundary": bp.to_record(), "ends": ends.to_record(),
              "refinement": ref.to_record()}
    if base_set:
        mats = []
        for w in windows:
            lo, hi = (int(v) for v in w.split(","))
            try:
                m = bd.rho_matrix(spec, list(base_set), specs, (lo, hi), n=n,
                                  base=Fraction(proxy))
            except (ValueError, KeyError) as exc:
                raise UsageProblem(str(exc)) from None
            mats.append({**m.to_record(),
                         "chain_distance": [[to_json(v) for v in row]
                                            for row in bd.chain_distance(m)]})
        report["rho"] = mats
    _emit(report, fmt)


@main.group()
def family():
    """Built-in families."""


@family.command("list")
def family_list():
    for name, doc in list_families().items():
        click.echo(f"{name}\t{doc}")
    click.echo(f"# presentations: {', '.join(sorted(BUILTIN_PRESENTATIONS))}")


@family.command("export")
@click.argument("name")
@click.option("--n", "n", type=int, default=6, show_default=True)
@click.option("--param", "param", multiple=True)
@click.option("--presentation", default=None)
def family_export(name, n, param, presentation):
    """Print a truncation in the digraph text format."""
    if name not in CATALOG:
        raise UsageProblem(f"unknown family {name!r}; choose from {', '.join(sorted(CATALOG))}")
    spec = _family_spec(name, _params(param), presentation)
    try:
        D = realize(spec, n).digraph
    except (ValueError, KeyError, RewriteBudgetExceeded) as exc:
        raise UsageProblem(str(exc)) from None
    click.echo(dump_digraph(D), nl=False)


@main.command()
@click.option("--criterion", "names", multiple=True, help="Run only these (repeatable).")
@click.option("--seed", type=int, default=cr.DEFAULT_SEED, show_default=True)
@click.option("--workers", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def verify(names, seed, workers, fmt):
    """Run the acceptance criteria; exit 0 iff all pass."""
    _set_workers(workers)
    try:
        results = cr.run(names, seed)
    except KeyError as exc:
        raise UsageProblem(str(exc.args[0])) from None
    if fmt == "json":
        click.echo(json.dumps(_jsonable({"config": {"command": "verify", "seed": seed,
                                                    "criteria": list(names)},
                                         "results": [r.to_record() for r in results]}),
                              sort_keys=True, indent=2))
    else:
        for r in results:
            click.echo(r.line())
    sys.exit(EXIT_OK if all(r.ok for r in results) else EXIT_FAIL)


if __name__ == "__main__":
    main()
