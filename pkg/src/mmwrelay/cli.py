"""Command-line front end: sweeps, validation campaigns, figure presets."""

import importlib.resources
import sys

import click

from mmwrelay.config import ConfigError, ScenarioConfig
from mmwrelay.sweep import emit_csv, run_sweep, run_validation

_OVERRIDE_KEYS = {
    "seed": "master_seed",
    "trials": "trials",
    "workers": "workers",
    "mode": "mode",
}


def _load(config_path, preset=None, **overrides):
    try:
        if preset is not None:
            ref = importlib.resources.files("mmwrelay.presets").joinpath(f"{preset}.yaml")
            if not ref.is_file():
                raise ConfigError(f"unknown preset {preset!r}; see list-presets")
            import yaml

            cfg = ScenarioConfig.from_dict(yaml.safe_load(ref.read_text(encoding="utf-8")))
        elif config_path is not None:
            cfg = ScenarioConfig.load(config_path)
        else:
            cfg = ScenarioConfig.from_dict({})
        dotted = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "engine":
                dotted["engines"] = {"analytical": "analytical", "mc": "mc", "both": "both"}[value]
            elif key == "mode":
                dotted["mode"] = {"published": "published", "renormalized": "renormalized"}[value]
            else:
                dotted[_OVERRIDE_KEYS[key]] = value
        return cfg.with_overrides(dotted) if dotted else cfg
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


_common = [
    click.option("--config", "config_path", type=click.Path(exists=True), default=None),
    click.option("--out", "out_path", type=click.Path(), default=None),
    click.option("--seed", type=int, default=None, help="master seed override"),
    click.option("--trials", type=int, default=None),
    click.option("--workers", type=int, default=None),
    click.option("--engine", type=click.Choice(["analytical", "mc", "both"]), default=None),
    click.option(
        "--mode", type=click.Choice(["published", "renormalized"]), default=None
    ),
]


def _with_common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Dual-hop mmWave relay reliability toolkit."""


@main.command("sweep")
@_with_common
def sweep_cmd(config_path, out_path, seed, trials, workers, engine, mode):
    """Run the configured metric sweep and write the CSV dataset."""
    cfg = _load(config_path, seed=seed, trials=trials, workers=workers, engine=engine, mode=mode)
    result = run_sweep(cfg)
    out = out_path or cfg["output"]
    emit_csv(result, out)
    click.echo(f"wrote {len(result.rows)} rows to {out}")


@main.command("validate")
@_with_common
@click.option("--report", "report_path", type=click.Path(), default="validation.jsonl")
def validate_cmd(config_path, out_path, seed, trials, workers, engine, mode, report_path):
    """Compare analytical engine against Monte Carlo; exit 1 on failure.

    Requires both engines; checks run in renormalized mode for the verdict
    and in published mode for the mass-gap diagnostics.
    """
    cfg = _load(config_path, seed=seed, trials=trials, workers=workers, engine=engine, mode=mode)
    if cfg["engines"] != "both":
        click.echo("validate requires engines: both", err=True)
        sys.exit(2)
    records, code = run_validation(cfg, report_path=report_path)
    n_fail = sum(1 for r in records if not r["passed"])
    click.echo(f"{len(records)} checks, {n_fail} failed; report: {report_path}")
    sys.exit(code)


@main.command("preset")
@click.argument("name")
@_with_common
def preset_cmd(name, config_path, out_path, seed, trials, workers, engine, mode):
    """Run a built-in figure preset (fig2 ... fig12)."""
    cfg = _load(None, preset=name, seed=seed, trials=trials, workers=workers, engine=engine, mode=mode)
    result = run_sweep(cfg)
    out = out_path or f"{name}.csv"
    emit_csv(result, out)
    click.echo(f"wrote {len(result.rows)} rows to {out}")


@main.command("list-presets")
def list_presets_cmd():
    """List the built-in figure presets."""
    root = importlib.resources.files("mmwrelay.presets")
    names = sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))
    for name in names:
        click.echo(name)


if __name__ == "__main__":
    main()
