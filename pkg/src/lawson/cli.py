"""Command-line front end: configuration, serialization, caching,
and the golden-value selftest.

Subcommands: ``alpha`` (area/Willmore coefficients), ``omega`` (walk
integrals), ``mzv`` (alternating zeta values), ``area-table`` (the
genus 3..10 table), ``genus2-bound`` (the triangulation bound),
``ift-genus`` (contraction-mapping genus bounds), ``selftest``
(golden-value regression suite).

Exit codes: 0 ok, 1 computation error, 2 golden-check failure, 3 bad
arguments.  JSON output carries a top-level ``"schema": "1"`` and is
byte-identical for identical configuration and cache state: centers
are printed at the configured digit count, radii at 3 significant
digits, and keys are sorted.

The cache directory (``--cache-dir``, or the environment variable
``LAWSON_CACHE_DIR``; the flag wins) stores alternating-zeta values
and computed coefficient series, so repeated runs are fast.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import click

from .area import TailConfig, area_table, rows_to_csv
from .cdisc import Context, DiscError
from .genus2 import (CENTER_PARAMS, PAPER_PARAMS, TriangulationParams,
                     bound as genus2_bound_value, optimize_bound)
from .ift import (IftParams, NoFeasiblePoint, cauchy_config,
                  coefficients_ab, genus_bound, optimize_genus)
from .mpl import (CACHE_ENV_VAR, MplError, MzvCache, MzvIndex,
                  alternating_mzv)
from .omega import PI4, OmegaWord, depth2_closed_form, omega_eval
from .series import area_coefficients, build_series
from .symbolic import _TABLE, closed_form, numeric

__all__ = ["main", "RunConfig", "GoldenFailure"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_GOLDEN = 2
EXIT_USAGE = 3


class GoldenFailure(Exception):
    """One or more golden checks failed."""


@dataclass
class RunConfig:
    """Options shared by every subcommand."""

    digits: int = 60
    phi: object = PI4  # "pi/4" or a float in (0, pi/2)
    output: str = "json"
    cache_dir: str | None = None
    certified: bool = True
    extended: bool = False
    jobs: int = 1
    out: str | None = None

    def context(self, digits: int | None = None) -> Context:
        return Context(digits=digits or self.digits,
                       certified=self.certified)

    def mzv_cache(self) -> MzvCache | None:
        if self.cache_dir is None:
            return None
        return MzvCache.at_dir(self.cache_dir)


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------
def _fmt_real(x, digits: int) -> str:
    """Fixed-digit scientific notation for an mpfr (deterministic)."""
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    if set(mant) == {"0"}:
        return "0"
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1:+03d}"


def _disc_dict(c, digits: int) -> dict:
    return {"re": _fmt_real(c.c.real, digits),
            "im": _fmt_real(c.c.imag, digits),
            "radius": f"{c.r:.3g}"}


def _emit(payload: dict, cfg: RunConfig, csv_text: str | None = None,
          text: str | None = None) -> None:
    if cfg.output == "json":
        body = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    elif cfg.output == "csv":
        if csv_text is None:
            raise click.UsageError(
                "this subcommand has no CSV representation")
        body = csv_text
    else:
        body = text if text is not None else \
            json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(body)
    else:
        click.echo(body, nl=False)


def _parse_phi(value: str):
    if value.strip() in ("pi/4", "pi4"):
        return PI4
    try:
        phi = float(value)
    except ValueError:
        raise click.UsageError(f"cannot parse angle {value!r}")
    if not 0.0 < phi < 1.5707963267948966:
        raise click.UsageError("phi must lie in (0, pi/2)")
    return phi


def _phi_key(phi) -> str:
    return "pi4" if phi == PI4 else f"{float(phi):.17g}"


# ----------------------------------------------------------------------
# the coefficient store
# ----------------------------------------------------------------------
def _alpha_store(cfg: RunConfig, order: int):
    """Load the alpha coefficients from the cache directory, computing
    and saving them when absent or too short."""
    mode = "minimal" if cfg.phi == PI4 else "general"
    path = None
    if cfg.cache_dir:
        os.makedirs(cfg.cache_dir, exist_ok=True)
        path = os.path.join(
            cfg.cache_dir,
            f"alphas-{cfg.digits}-{_phi_key(cfg.phi)}-{mode}.json")
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            if data.get("order", -1) >= order:
                ctx = cfg.context()
                out = []
                for rec in data["alphas"][:order + 1]:
                    d = ctx.from_str(rec["re"], rec["im"])
                    out.append(ctx.make(d.c, d.r + float(rec["radius"])))
                return out
    ctx = cfg.context()
    state = build_series(cfg.phi, order, ctx, mode=mode,
                         cache=cfg.mzv_cache())
    alphas = list(area_coefficients(state).coeffs)
    if path:
        store_digits = cfg.digits + 10
        data = {"schema": "1", "order": order,
                "alphas": [{"re": _fmt_real(c.c.real, store_digits),
                            "im": _fmt_real(c.c.imag, store_digits),
                            "radius": repr(c.r)} for c in alphas]}
        with open(path, "w") as fh:
            json.dump(data, fh)
    return alphas


# ----------------------------------------------------------------------
# the command group
# ----------------------------------------------------------------------
@click.group(name="lawson")
@click.option("--digits", type=int, default=60, show_default=True,
              help="working precision in decimal digits (>= 20)")
@click.option("--phi", "phi_", default="pi/4", show_default=True,
              help='angle: "pi/4" (exact) or a real in (0, pi/2)')
@click.option("--output", type=click.Choice(["json", "csv", "text"]),
              default="json", show_default=True,
              help="serialization format; CSV columns match the JSON "
                   "field order documented per subcommand")
@click.option("--cache-dir", envvar=CACHE_ENV_VAR, default=None,
              help="persistent cache directory (flag wins over "
                   f"${CACHE_ENV_VAR})")
@click.option("--certified/--no-certified", default=True,
              show_default=True,
              help="carry certified error radii (disable for speed)")
@click.option("--extended", is_flag=True,
              help="allow the long extended runs (ift n > 4)")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="worker threads for independent sub-tasks")
@click.option("--out", type=click.Path(), default=None,
              help="write output to FILE instead of stdout")
@click.pass_context
def cli(ctx, digits, phi_, output, cache_dir, certified, extended,
        jobs, out):
    """Certified computations for the minimal-surface family."""
    if digits < 20:
        raise click.UsageError("--digits must be at least 20")
    if jobs < 1:
        raise click.UsageError("--jobs must be at least 1")
    ctx.obj = RunConfig(digits=digits, phi=_parse_phi(phi_),
                        output=output, cache_dir=cache_dir,
                        certified=certified, extended=extended,
                        jobs=jobs, out=out)


@cli.command()
@click.option("--order", type=int, required=True,
              help="highest t-order of the coefficient series")
@click.pass_obj
def alpha(cfg: RunConfig, order):
    """Area/Willmore coefficients alpha_1..alpha_order.

    CSV columns: k, re, im, radius.
    """
    if order < 1:
        raise click.UsageError("--order must be >= 1")
    alphas = _alpha_store(cfg, order)
    recs = [{"k": k, **_disc_dict(alphas[k], cfg.digits)}
            for k in range(1, order + 1)]
    payload = {"schema": "1", "subcommand": "alpha",
               "digits": cfg.digits, "order": order,
               "phi": _phi_key(cfg.phi), "alphas": recs}
    csv_text = "k,re,im,radius\n" + "".join(
        f"{r['k']},{r['re']},{r['im']},{r['radius']}\n" for r in recs)
    text = "".join(f"alpha_{r['k']:<2} = {r['re']} + {r['im']} i  "
                   f"(+- {r['radius']})\n" for r in recs)
    _emit(payload, cfg, csv_text, text)


@cli.command()
@click.option("--word", required=True,
              help="comma-separated letters in {1,2,3}, e.g. 2,2,3")
@click.option("--endpoint", type=click.Choice(["1", "i"]), default="1",
              show_default=True)
@click.pass_obj
def omega(cfg: RunConfig, word, endpoint):
    """One walk integral Omega_word at the chosen endpoint and angle."""
    try:
        letters = tuple(int(s) for s in word.split(","))
    except ValueError:
        raise click.UsageError(f"cannot parse word {word!r}")
    if any(ltr not in (1, 2, 3) for ltr in letters) or not letters:
        raise click.UsageError("word letters must be 1, 2 or 3")
    ctx = cfg.context()
    value = omega_eval(OmegaWord(letters, endpoint, cfg.phi), ctx,
                       cfg.mzv_cache())
    rec = _disc_dict(value, cfg.digits)
    payload = {"schema": "1", "subcommand": "omega", "word": list(letters),
               "endpoint": endpoint, "phi": _phi_key(cfg.phi),
               "digits": cfg.digits, "value": rec}
    csv_text = ("word,endpoint,re,im,radius\n"
                f"{'.'.join(map(str, letters))},{endpoint},"
                f"{rec['re']},{rec['im']},{rec['radius']}\n")
    text = (f"Omega_{{{','.join(map(str, letters))}}}({endpoint}) = "
            f"{rec['re']} + {rec['im']} i  (+- {rec['radius']})\n")
    _emit(payload, cfg, csv_text, text)


@cli.command()
@click.option("--index", "index_", required=True,
              help="signed zeta index, e.g. -2,1 for zeta(bar2, 1)")
@click.pass_obj
def mzv(cfg: RunConfig, index_):
    """One alternating multiple zeta value."""
    try:
        signed = tuple(int(s) for s in index_.split(","))
    except ValueError:
        raise click.UsageError(f"cannot parse index {index_!r}")
    if any(s == 0 for s in signed) or not signed:
        raise click.UsageError("index entries must be nonzero integers")
    idx = MzvIndex.from_signed(*signed)
    value = alternating_mzv(idx, cfg.context(), cfg.mzv_cache())
    rec = _disc_dict(value, cfg.digits)
    payload = {"schema": "1", "subcommand": "mzv", "index": idx.key(),
               "digits": cfg.digits, "value": rec}
    csv_text = ("index,re,im,radius\n"
                f"\"{idx.key()}\",{rec['re']},{rec['im']},{rec['radius']}\n")
    text = (f"zeta({idx.key()}) = {rec['re']} + {rec['im']} i  "
            f"(+- {rec['radius']})\n")
    _emit(payload, cfg, csv_text, text)


@cli.command(name="area-table")
@click.option("--gmin", type=int, default=3, show_default=True)
@click.option("--gmax", type=int, default=10, show_default=True)
@click.option("--order", type=int, default=21, show_default=True,
              help="number of coefficients K in the truncation")
@click.option("--ca", type=float, default=None,
              help="tail constant C_A for the error column")
@click.option("--tprime", type=float, default=None,
              help="tail radius T' for the error column")
@click.option("--derivs", type=int, default=0, show_default=True,
              help="orders the tail configuration is valid beyond")
@click.pass_obj
def area_table_cmd(cfg: RunConfig, gmin, gmax, order, ca, tprime, derivs):
    """The area table for genus gmin..gmax.

    CSV columns: genus, approx, error_bound, K.  The error column needs
    both --ca and --tprime (for instance from ``ift-genus``); without
    them it is left empty.
    """
    if not 1 <= gmin <= gmax:
        raise click.UsageError("need 1 <= gmin <= gmax")
    if (ca is None) != (tprime is None):
        raise click.UsageError("--ca and --tprime go together")
    tail = TailConfig(C_A=ca, T_prime=tprime, N_derivatives=derivs) \
        if ca is not None else None
    if cfg.phi != PI4:
        raise click.UsageError("the area table is defined at phi = pi/4")
    alphas = _alpha_store(cfg, order)
    ctx = cfg.context()
    genera = list(range(gmin, gmax + 1))
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        chunks = list(pool.map(
            lambda g: area_table(alphas, g, g, K=order, cfg=tail, ctx=ctx),
            genera))
    rows = [row for chunk in chunks for row in chunk]
    payload = {"schema": "1", "subcommand": "area-table",
               "digits": cfg.digits, "K": order,
               "rows": [{"genus": r.genus,
                         "approx": _disc_dict(r.approx, cfg.digits),
                         "error_bound":
                             None if r.error_bound is None
                             else f"{r.error_bound:.7g}"}
                        for r in rows]}
    csv_text = rows_to_csv(rows)
    _emit(payload, cfg, csv_text, csv_text)


@cli.command(name="genus2-bound")
@click.option("--seed", type=click.Choice(["paper", "center"]),
              default="paper", show_default=True,
              help="start the minimization from the reference "
                   "parameters or from the box center")
@click.option("--restarts", type=int, default=2, show_default=True)
@click.pass_obj
def genus2_bound_cmd(cfg: RunConfig, seed, restarts):
    """Triangulation upper bound for the genus-2 minimal surface area.

    CSV columns: seed, s0, s1, s2, s3, t1, t2, bound.
    """
    seed_params = PAPER_PARAMS if seed == "paper" else CENTER_PARAMS
    params, value = optimize_bound(seed_params, restarts=restarts)
    payload = {"schema": "1", "subcommand": "genus2-bound", "seed": seed,
               "seed_bound": f"{genus2_bound_value(seed_params):.12g}",
               "params": {k: f"{v:.12g}" for k, v in
                          zip(("s0", "s1", "s2", "s3", "t1", "t2"),
                              params.as_tuple())},
               "bound": f"{value:.12g}"}
    csv_text = ("seed,s0,s1,s2,s3,t1,t2,bound\n" + seed + ","
                + ",".join(f"{v:.12g}" for v in params.as_tuple())
                + f",{value:.12g}\n")
    text = (f"seed {seed}: bound {genus2_bound_value(seed_params):.12g}\n"
            f"optimized: bound {value:.12g}\n")
    _emit(payload, cfg, csv_text, text)


@cli.command(name="ift-genus")
@click.option("--n", "n_", type=int, required=True,
              help="ansatz order (1..8; > 4 needs --extended)")
@click.option("--derivs", type=int, default=None,
              help="derivative-correction order N (default n - 1)")
@click.option("--quadratic", is_flag=True,
              help="include the quadratic correction")
@click.option("--optimize/--no-optimize", "do_opt", default=True,
              help="search for the best feasible point")
@click.option("--verify", type=click.Path(exists=True), default=None,
              help="JSON parameter file to verify instead of optimizing")
@click.pass_obj
def ift_genus(cfg: RunConfig, n_, derivs, quadratic, do_opt, verify):
    """Contraction-mapping genus bound: optimize or verify a point.

    The verify file holds {"T": .., "R": [..], "varrho": [..],
    "rho": .., "kappa": ..}.  CSV columns: n, N, quadratic, T, R1, R2,
    R3, rho, kappa, C_K, T_prime, genus, feasible, C_A.
    """
    if not 1 <= n_ <= 8:
        raise click.UsageError("--n must be in 1..8")
    if n_ > 4 and not cfg.extended:
        raise click.UsageError(
            f"n = {n_} is an extended run; pass --extended")
    ctx = cfg.context(min(cfg.digits, 30))
    tables = coefficients_ab(n_, derivs, use_quadratic=quadratic,
                             ctx=ctx, cache=cfg.mzv_cache())
    if verify is not None:
        with open(verify) as fh:
            raw = json.load(fh)
        params = IftParams(T=float(raw["T"]),
                           R=tuple(float(v) for v in raw["R"]),
                           varrho=tuple(float(v) for v in
                                        raw.get("varrho", (1.0,) * 3)),
                           rho=float(raw.get("rho", 1.2)),
                           kappa=float(raw.get("kappa", 0.99999)))
        constants = genus_bound(tables, params)
    else:
        if not do_opt:
            raise click.UsageError("pass --verify FILE or --optimize")
        params, constants = optimize_genus(n_, derivs,
                                           use_quadratic=quadratic,
                                           tables=tables)
    c_a, t_prime = cauchy_config(tables, params, constants)
    payload = {"schema": "1", "subcommand": "ift-genus", "n": n_,
               "N": tables.N, "quadratic": quadratic,
               "params": {"T": params.T, "R": list(params.R),
                          "varrho": list(params.varrho),
                          "rho": params.rho, "kappa": params.kappa},
               "constants": {"C_K": constants.C_K,
                             "T_prime": constants.T_prime,
                             "C_G": list(constants.C_G),
                             "C_Lip": list(constants.C_Lip),
                             "genus": constants.genus,
                             "feasible": constants.feasible},
               "tail": {"C_A": c_a, "T_prime": t_prime}}
    csv_text = ("n,N,quadratic,T,R1,R2,R3,rho,kappa,C_K,T_prime,genus,"
                "feasible,C_A\n"
                f"{n_},{tables.N},{int(quadratic)},{params.T:.9g},"
                + ",".join(f"{r:.9g}" for r in params.R)
                + f",{params.rho:.9g},{params.kappa:.9g},"
                f"{constants.C_K:.9g},{constants.T_prime:.9g},"
                f"{constants.genus:.9g},{int(constants.feasible)},"
                f"{c_a:.9g}\n")
    text = (f"n={n_} N={tables.N} quadratic={quadratic}\n"
            f"genus bound {constants.genus:.6f} "
            f"({'feasible' if constants.feasible else 'NOT feasible'})\n"
            f"T={params.T:.6g} R={params.R} rho={params.rho:.4g}\n"
            f"C_K={constants.C_K:.4g} T'={constants.T_prime:.6g} "
            f"C_A={c_a:.6g}\n")
    _emit(payload, cfg, csv_text, text)


# ----------------------------------------------------------------------
# the golden-value suite
# ----------------------------------------------------------------------
#: printed reference coefficients (60 significant digits)
_ALPHA_GOLDENS = {
    1: "0.693147180559945309417232121458176568075500134360255254120680",
    3: "2.70462803210908714214941086340076247922121915776612248403261",
    5: "3.69962699449761843989338013547104461773632954830910515716231",
    7: "-53.1688000602634657601186493744463143722221041377109549606883",
    9: "-459.565676371488633633252895256096561995526272030689845199417",
    11: "-260.931729774858246058852756835445016841900749580577223718493",
}

#: printed area-table approx column, genus 3..10, 10 significant digits
_AREA_GOLDENS = ["22.82027709", "23.32191299", "23.64134581",
                 "23.86347454", "24.02726927", "24.15322275",
                 "24.25318196", "24.33449044"]


def _golden_alphas(cfg: RunConfig):
    sub = RunConfig(digits=50, phi=PI4, cache_dir=cfg.cache_dir,
                    certified=True)
    return sub, _alpha_store(sub, 21)


def _check_alpha_goldens(cfg: RunConfig) -> str | None:
    sub, alphas = _golden_alphas(cfg)
    ctx = sub.context()
    for k, ref in _ALPHA_GOLDENS.items():
        want = ctx.from_str(ref)
        got = alphas[k]
        rel = (got.sub(want)).abs_upper() / max(want.abs_lower(), 1.0)
        if not got.contains(want) or rel > 1e-30:
            return f"alpha_{k} disagrees (rel {rel:.2g})"
    for k in (2, 4, 6):
        if alphas[k].abs_upper() > 1e-25:
            return f"alpha_{k} fails to vanish"
    return None


def _check_zeta_table(cfg: RunConfig) -> str | None:
    ctx = Context(digits=50)
    cache = cfg.mzv_cache()
    for key in sorted(_TABLE):
        idx = MzvIndex.from_signed(*(int(s) for s in key.split(",")))
        if not idx.convergent:
            continue
        exact = numeric(closed_form(idx), ctx, cache)
        direct = alternating_mzv(idx, ctx, cache)
        if exact.sub(direct).abs_upper() > 1e-30:
            return f"zeta({key}) mismatch"
    return None


def _check_depth2_forms(cfg: RunConfig) -> str | None:
    ctx = Context(digits=30)
    for phi in (0.5235987755982988, 1.0471975511965976):  # pi/6, pi/3
        closed = depth2_closed_form("21@1", phi, ctx)
        direct = omega_eval(OmegaWord((2, 1), "1", phi), ctx,
                            cfg.mzv_cache(), route="B")
        if closed.sub(direct).abs_upper() > 1e-25:
            return f"Omega_21(1) mismatch at phi = {phi:.4f}"
    return None


def _check_area_column(cfg: RunConfig) -> str | None:
    sub, alphas = _golden_alphas(cfg)
    rows = area_table(alphas, 3, 10, K=21, ctx=sub.context())
    got = [f"{float(r.approx.real().to_complex().real):.10g}"
           for r in rows]
    if got != _AREA_GOLDENS:
        bad = next(i for i, (a, b) in
                   enumerate(zip(got, _AREA_GOLDENS)) if a != b)
        return f"genus {bad + 3}: {got[bad]} != {_AREA_GOLDENS[bad]}"
    return None


_SELFTEST_ITEMS = (
    ("alpha-coefficients", _check_alpha_goldens),
    ("zeta-closed-forms", _check_zeta_table),
    ("depth2-forms", _check_depth2_forms),
    ("area-approx-column", _check_area_column),
)


@cli.command()
@click.pass_obj
def selftest(cfg: RunConfig):
    """Golden-value suite; nonzero exit (2) on any failure.

    Runs at its own fixed precision (the reference values are printed
    at 50 digits) regardless of --digits.
    """
    def run_item(item):
        name, fn = item
        try:
            detail = fn(cfg)
        except Exception as exc:  # a crash is a failure, not an abort
            detail = f"{type(exc).__name__}: {exc}"
        return name, detail

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run_item, _SELFTEST_ITEMS))
    else:
        results = [run_item(item) for item in _SELFTEST_ITEMS]
    payload = {"schema": "1", "subcommand": "selftest",
               "results": [{"item": name,
                            "status": "PASS" if detail is None else "FAIL",
                            "detail": detail} for name, detail in results]}
    csv_text = "item,status,detail\n" + "".join(
        f"{name},{'PASS' if d is None else 'FAIL'},{d or ''}\n"
        for name, d in results)
    text = "".join(
        f"{'PASS' if d is None else 'FAIL'}  {name}"
        + (f"  ({d})" if d else "") + "\n"
        for name, d in results)
    _emit(payload, cfg, csv_text, text)
    failures = [name for name, d in results if d is not None]
    if failures:
        raise GoldenFailure(", ".join(failures))


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------
def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except GoldenFailure as exc:
        click.echo(f"golden checks failed: {exc}", err=True)
        return EXIT_GOLDEN
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.exceptions.Exit as exc:  # --help and friends
        return exc.exit_code
    except click.Abort:
        return EXIT_ERROR
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except (DiscError, MplError, NoFeasiblePoint, ArithmeticError,
            ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
