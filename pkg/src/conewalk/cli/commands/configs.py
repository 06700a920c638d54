"""`conewalk configs`: list the shipped experiment configs."""

import click

from ...configs import resolve_config, shipped_configs
from ...exceptions import ConeWalkError
from ...models import RunConfig


@click.command(name="configs")
def configs():
    """List the shipped configs usable as --config NAME."""
    for name in shipped_configs():
        try:
            config = RunConfig.load(resolve_config(name))
        except ConeWalkError as e:
            click.echo(f"{name:24s} INVALID: {e.user_message}")
            continue
        cone = config.cone
        cone_text = cone.label or (
            f"Weyl {cone.family.value}{cone.dimension}" if cone.family else "forms"
        )
        click.echo(
            f"{name:24s} {cone_text:12s} {config.distribution.kind.value:24s} "
            f"{config.method.value:10s} n <= {config.horizons[-1]}"
        )
