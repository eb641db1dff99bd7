"""Command-line entry point of the sharp Sobolev laboratory.

Exit codes: 0 when every check passes, 2 when some inequality, tolerance
or extrapolation check fails, 1 on usage or configuration errors.
"""
import functools
import json
import sys
from typing import Callable, Dict, Optional

import click
from dotenv import load_dotenv

from src import __version__
from src.core.config_manager import ConfigManager, RunConfig
from src.core.errors import ConfigError
from src.core.system.auditor import AuditResult, LabAuditor
from src.utils.logger import setup_logger
from src.utils.report_writer import ReportWriter, to_jsonable

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

OVERRIDE_KEYS = ('manifold', 'n', 'p', 'a', 'b', 'c', 'lambda_min', 'lambda_max', 'lambda_count',
                 'tol', 'quad_tol', 'k', 'mollifier_width', 'grid_nodes', 'n_jobs', 'seed',
                 'campaign_count', 'tail_exponent_hint', 'out', 'format')


def run_options(command: Callable) -> Callable:
    """Flags shared by every experiment; unset flags keep the config file values"""
    options = [
        click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                     default=None, help='JSON run configuration'),
        click.option('--config-dir', default='config', show_default=True,
                     help='Directory holding settings.json'),
        click.option('--manifold', default=None, help='euclidean, cone:<theta> or table:<csv>'),
        click.option('--n', type=int, default=None, help='Dimension'),
        click.option('--p', type=float, default=None, help='Sobolev exponent'),
        click.option('--a', type=float, default=None, help='CKN weight a'),
        click.option('--b', type=float, default=None, help='CKN weight b'),
        click.option('--c', type=float, default=None, help='CKN constant for the non-collapse bound'),
        click.option('--lambda-min', type=float, default=None),
        click.option('--lambda-max', type=float, default=None),
        click.option('--lambda-count', type=int, default=None),
        click.option('--tol', type=float, default=None, help='Relative tolerance of limit checks'),
        click.option('--quad-tol', type=float, default=None, help='Quadrature tolerance'),
        click.option('--k', type=float, default=None, help='Truncation level of the bubble target'),
        click.option('--mollifier-width', type=float, default=None),
        click.option('--grid-nodes', type=int, default=None, help='Transport grid size'),
        click.option('--n-jobs', type=int, default=None, help='joblib workers'),
        click.option('--seed', type=int, default=None, help='Seed of the randomized campaign'),
        click.option('--campaign-count', type=int, default=None),
        click.option('--tail-exponent-hint', type=float, default=None),
        click.option('--out', default=None, help='Output directory'),
        click.option('--format', 'format', type=click.Choice(['json', 'csv']), default=None,
                     help='Rendering of the summary on stdout'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def resolve_config(kwargs: Dict) -> RunConfig:
    manager = ConfigManager(kwargs.pop('config_dir'))
    path = kwargs.pop('config_path')
    overrides = {key: kwargs.get(key) for key in OVERRIDE_KEYS}
    return manager.load_run_config(path, overrides)


def finish(command: str, config: RunConfig, result: AuditResult) -> int:
    """Write the reports of one experiment, print its summary and map its status to an exit code"""
    writer = ReportWriter(config.out, config=config.to_dict(), tool_version=__version__)
    writer.write_json(command, result)
    csv_paths = []
    for name, report in sorted(result.reports.items()):
        path = writer.write_csv(f"{command}_{name}", report)
        if path:
            csv_paths.append(path)

    if config.format == 'csv':
        for path in csv_paths:
            click.echo(path)
    else:
        summary = {'experiment': result.module_name, 'status': result.status,
                   'message': result.message, 'details': to_jsonable(result.details),
                   'files': writer.written}
        click.echo(json.dumps(summary, sort_keys=True, indent=2))
    if result.invalid_input:
        click.echo(f"Error: {result.message}", err=True)
        return EXIT_USAGE
    return EXIT_FAILED if result.status == 'ERROR' else EXIT_OK


def experiment(command: str, run: Callable[[LabAuditor], AuditResult]) -> Callable:
    """Decorator body shared by every experiment command"""
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(**kwargs) -> int:
            config = resolve_config(kwargs)
            auditor = LabAuditor(config)
            return finish(command, config, run(auditor))
        return run_options(wrapper)
    return decorator


@click.group()
@click.version_option(__version__, prog_name='sobolev-lab')
def cli():
    """Sharp Sobolev, log-Sobolev and CKN constants on radial model manifolds."""


@cli.command()
@experiment('constants', lambda auditor: auditor.audit_constants())
def constants():
    """Tables of AT(n,p), L(n,p), ω_n and K_(a,b)"""


@cli.group()
def manifold():
    """Radial model manifolds"""


@manifold.command('validate')
@experiment('manifold_validate', lambda auditor: auditor.audit_manifold())
def manifold_validate():
    """Bishop-Gromov validation of the model"""


@cli.group()
def bubbles():
    """Bubble integral functionals"""


@bubbles.command('asymptotics')
@experiment('bubbles_asymptotics', lambda auditor: auditor.audit_bubbles())
def bubbles_asymptotics():
    """H, L and K limits against their closed forms"""


@cli.group()
def scan():
    """Sharpness scans along λ-grids"""


@scan.command('sobolev')
@experiment('scan_sobolev', lambda auditor: auditor.audit_scan('sobolev'))
def scan_sobolev():
    """Talentian-bubble scan, λ→∞"""


@scan.command('logsob')
@experiment('scan_logsob', lambda auditor: auditor.audit_scan('logsob'))
def scan_logsob():
    """Gaussian-bubble scan, λ→0"""


@scan.command('ckn')
@experiment('scan_ckn', lambda auditor: auditor.audit_scan('ckn'))
def scan_ckn():
    """Weighted-bubble scan, λ→∞"""


@cli.group()
def transport():
    """Radial optimal transport"""


@transport.command('verify')
@experiment('transport_verify', lambda auditor: auditor.audit_transport())
def transport_verify():
    """Monge-Ampère residual, determinant-trace campaign and proof pipelines"""


@cli.command()
@experiment('isoperimetric', lambda auditor: auditor.audit_isoperimetric())
def isoperimetric():
    """Sharp isoperimetric inequality for metric balls"""


@cli.command()
@experiment('noncollapse', lambda auditor: auditor.audit_noncollapse())
def noncollapse():
    """Volume non-collapse implied by a CKN constant"""


def main(argv: Optional[list] = None) -> int:
    load_dotenv()
    logger = setup_logger('SobolevLab')
    try:
        code = cli.main(args=argv, prog_name='sobolev-lab', standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        click.echo('Aborted!', err=True)
        return EXIT_USAGE
    except click.exceptions.ClickException as e:
        e.show()
        return EXIT_USAGE
    except ConfigError as e:
        logger.error(f"Configuration error: {str(e)}")
        click.echo(f"Configuration error: {str(e)}", err=True)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"Cannot write reports: {str(e)}")
        click.echo(f"I/O error: {str(e)}", err=True)
        return EXIT_USAGE
    # --help and --version return None
    return code if isinstance(code, int) else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
