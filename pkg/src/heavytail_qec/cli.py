"""Command-line frontend; a thin HTTP client of the service layer.

Without --server the FastAPI app runs in process, so no deployment is
needed for batch use.  Exit codes: 0 success, 1 diagnostic failure,
2 usage error, 3 validation error, 4 numerical-precision failure.
"""

from __future__ import annotations

import json
import sys

import click

EXIT_DIAGNOSTIC = 1
EXIT_VALIDATION = 3
EXIT_PRECISION = 4


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # starlette's httpx pin warning
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail_from_response(resp) -> None:
    if resp.status_code == 422:
        detail = resp.json().get("detail", [])
        click.echo("validation errors:", err=True)
        for err in detail:
            loc = ".".join(str(p) for p in err.get("loc", []) if p != "body")
            click.echo(f"  {loc}: {err.get('msg')}", err=True)
        sys.exit(EXIT_VALIDATION)
    if resp.status_code == 400:
        detail = resp.json().get("detail", {})
        code = detail.get("code", "error")
        click.echo(f"{code}: {detail.get('message')}", err=True)
        if code == "precision_insufficient":
            click.echo("hint: retry with a larger --precision-bits", err=True)
            sys.exit(EXIT_PRECISION)
        sys.exit(EXIT_VALIDATION)
    click.echo(f"service error {resp.status_code}: {resp.text}", err=True)
    sys.exit(EXIT_VALIDATION)


def _parse_sigma_grid(text: str) -> list[float]:
    text = text.strip()
    if not text:
        raise click.UsageError("--sigma-grid must be nonempty")
    try:
        if ".." in text:
            span, _, n = text.partition(":")
            lo, _, hi = span.partition("..")
            import numpy as np

            return [float(x) for x in np.geomspace(float(lo), float(hi), int(n))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad --sigma-grid {text!r}: {exc}")


def _set_by_path(cfg: dict, key: str, raw: str) -> None:
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = cfg
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = value


def _echo_config(payload: dict) -> None:
    click.echo("resolved config: " + json.dumps(payload, sort_keys=True))


@click.group()
@click.option("--server", default=None, envvar="HEAVYTAIL_QEC_SERVER", help="base URL of a running service (default: in-process)")
@click.pass_context
def main(ctx, server):
    """Analytic tables, distribution diagnostics, and surface-code experiments."""
    ctx.obj = server


@main.command()
@click.option("--family", type=click.Choice(["gaussian", "student", "stable"]), required=True)
@click.option("--nu", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--d", "distances", type=int, multiple=True, default=(3,), show_default=True)
@click.option("--n-qubits", type=int, default=None, help="override the 4w+1 default")
@click.option("--sigma-grid", required=True, help='comma list or geometric "lo..hi:n"')
@click.option("--fit", is_flag=True, help="append fitted (exponent, coefficient) per curve")
@click.option("--precision-bits", type=int, default=256, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV output path (default: stdout)")
@click.option("--fit-out", type=click.Path(), default=None, help="fit CSV path (default: <out>.fit.csv)")
@click.pass_obj
def analytic(server, family, nu, alpha, distances, n_qubits, sigma_grid, fit, precision_bits, out, fit_out):
    """Tabulate (sigma, P_ph, P_unc, P_cor) for a family/distance grid."""
    grid = _parse_sigma_grid(sigma_grid)
    payload = {
        "family": family,
        "nu": nu,
        "alpha": alpha,
        "distances": list(distances),
        "n_qubits": n_qubits,
        "sigma_grid": grid,
        "fit": fit,
        "precision_bits": precision_bits,
    }
    _echo_config(payload)
    with _client(server) as client:
        resp = client.post("/analytic/table", json=payload)
        if resp.status_code != 200:
            _fail_from_response(resp)
        body = resp.json()
    if out:
        with open(out, "w") as fh:
            fh.write(body["csv"])
        click.echo(f"wrote {out}")
    else:
        click.echo(body["csv"], nl=False)
    if fit:
        path = fit_out or ((out + ".fit.csv") if out else None)
        if path:
            with open(path, "w") as fh:
                fh.write(body["fit_csv"])
            click.echo(f"wrote {path}")
        else:
            click.echo(body["fit_csv"], nl=False)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="dotted-path config override")
@click.option("--seed", type=int, default=None, help="override master_seed")
@click.option("--out", type=click.Path(), default=None, help="override output_path")
@click.option("--workers", type=int, default=None)
@click.option("--no-resume", is_flag=True)
@click.pass_obj
def simulate(server, config_path, overrides, seed, out, workers, no_resume):
    """Run a Monte Carlo experiment from a JSON config file."""
    with open(config_path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise click.UsageError(f"config is not valid JSON: {exc}")
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise click.UsageError(f"--set expects KEY=VALUE, got {item!r}")
        _set_by_path(cfg, key, value)
    if seed is not None:
        cfg["master_seed"] = seed
    if out is not None:
        cfg["output_path"] = out
    _echo_config(cfg)
    payload = {"config": cfg, "workers": workers, "resume": not no_resume}
    with _client(server) as client:
        resp = client.post("/experiments/run", json=payload)
        if resp.status_code != 200:
            _fail_from_response(resp)
        body = resp.json()
    target = cfg.get("output_path")
    if target:
        with open(target, "w") as fh:
            fh.write(body["csv"])
        with open(target + ".manifest.json", "w") as fh:
            json.dump(body["manifest"], fh, indent=1)
        click.echo(f"wrote {target} and {target}.manifest.json")
    else:
        click.echo(body["csv"], nl=False)


@main.command("dist-check")
@click.option("--family", type=click.Choice(["gaussian", "student", "stable"]), required=True)
@click.option("--sigma", type=float, required=True)
@click.option("--nu", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--samples", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--t", "t_values", type=float, multiple=True, default=(0.5, 1.0, 2.0), show_default=True)
@click.option("--sample-scale", type=float, default=1.0, hidden=True)
@click.pass_obj
def dist_check(server, family, sigma, nu, alpha, samples, seed, t_values, sample_scale):
    """Compare the empirical characteristic function against the closed form."""
    spec = {"family": family, "sigma": sigma}
    if nu is not None:
        spec["nu"] = nu
    if alpha is not None:
        spec["alpha"] = alpha
    payload = {
        "spec": spec,
        "samples": samples,
        "seed": seed,
        "t_values": list(t_values),
        "sample_scale": sample_scale,
    }
    _echo_config(payload)
    with _client(server) as client:
        resp = client.post("/distributions/check", json=payload)
        if resp.status_code != 200:
            _fail_from_response(resp)
        body = resp.json()
    for e in body["entries"]:
        click.echo(
            f"t={e['t']:<4g} empirical={e['empirical']:+.6f} analytic={e['analytic']:+.6f} "
            f"se={e['std_error']:.2e} deviation={e['n_se']:.2f} SE"
        )
    if body["passed"]:
        click.echo("PASS")
    else:
        click.echo("FAIL: empirical cf deviates beyond the SE threshold")
        sys.exit(EXIT_DIAGNOSTIC)


@main.command("layout-dump")
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def layout_dump(server, out):
    """Print the code layout, stabilizers, logicals, and round schedule."""
    with _client(server) as client:
        resp = client.get("/layout")
        if resp.status_code != 200:
            _fail_from_response(resp)
        text = resp.json()["text"]
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote {out}")
    else:
        click.echo(text)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
