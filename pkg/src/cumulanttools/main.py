import click

from cumulanttools.cumulants import cli as cumulants_cli
from cumulanttools.forms import cli as forms_cli
from cumulanttools.matrices import cli as matrices_cli
from cumulanttools.partitions import cli as partitions_cli
from cumulanttools.theorems import cli as theorems_cli
from cumulanttools.wick import (
    clt_command,
    joint_cumulant_command,
    phi_command,
    wick_command,
)


@click.group()
@click.option("--pretty", is_flag=True, help="Indent JSON output.")
def cli(pretty: bool) -> None:
    """cumulanttools main entrypoint."""


cli.add_command(partitions_cli, name="partitions")
cli.add_command(cumulants_cli, name="cumulants")
cli.add_command(wick_command)
cli.add_command(phi_command)
cli.add_command(joint_cumulant_command)
cli.add_command(clt_command)
cli.add_command(forms_cli, name="qform")
cli.add_command(theorems_cli, name="check")
cli.add_command(matrices_cli, name="matrix")


if __name__ == "__main__":
    cli()
