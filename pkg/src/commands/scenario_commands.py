# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

import asyncio
import logging

from src.core.errors import ConfigError
from src.harness.config import FIELD_PARSERS, resolve_config
from src.harness.emit import FORMATS, emit
from src.harness.presets import get_experiment, get_preset, list_presets
from src.harness.runner import estimate_x, run_scenario
from src.metrics.leaders import MAX_EXACT_N, exact_enlisted_leaders_mean
from src.utility.helpers import format_table, format_time
from src.utility.views import ReportView

# Flags whose spelling differs from the field name.
FLAG_ALIASES = {'synchronizer': ('--sync', '--synchronizer')}


def add_scenario_arguments(parser):
    """
    Adds --preset, --config, the output flags and one flag per
    ScenarioConfig field. Field flags are kept as text and parsed together
    with the config file values.
    """
    parser.add_argument('--preset', help="named scenario, see 'viewsync presets'")
    parser.add_argument('--config', help="flat KEY=value scenario file")
    parser.add_argument('--out', help="write the result to this file")
    parser.add_argument('--format', choices=FORMATS, help="output format, inferred from --out when omitted")
    for name in FIELD_PARSERS:
        if name == 'enforce_wish_floor':
            parser.add_argument('--no-wish-floor', dest='enforce_wish_floor', action='store_const', const=False,
                                help="skip the wish interval bounds")
            continue
        flags = FLAG_ALIASES.get(name, ('--' + name.replace('_', '-'),))
        parser.add_argument(*flags, dest=name, metavar=name.upper())


def scenario_overrides(args):
    return {name: getattr(args, name) for name in FIELD_PARSERS if getattr(args, name, None) is not None}


def resolve_from_args(args):
    preset = get_preset(args.preset) if args.preset else None
    return preset, resolve_config(preset, args.config, scenario_overrides(args))


class ScenarioCommands:
    """
    Single scenario commands: run, presets and estimate-x.
    """
    def __init__(self, app):
        self.app = app
        self.logger = logging.getLogger('scenario_commands')

    def register(self, subparsers):
        run = subparsers.add_parser('run', help="simulate one scenario and print its report")
        add_scenario_arguments(run)
        run.add_argument('--page', type=int, help="print only this page of the report (1-based)")
        self.app.add_command('run', self.run)

        subparsers.add_parser('presets', help="list named scenarios and experiments")
        self.app.add_command('presets', self.presets)

        estimate = subparsers.add_parser('estimate-x', help="estimate the leaders enlisted after the last honest view")
        estimate.add_argument('--experiment', default='expected-x', help="named experiment with n, f and trials")
        estimate.add_argument('--n', type=int, help="number of nodes")
        estimate.add_argument('--f', type=int, help="corrupt nodes")
        estimate.add_argument('--trials', type=int, help="random rotations to draw")
        estimate.add_argument('--seed', type=int, default=0, help="seed for the rotations")
        estimate.add_argument('--exact', action='store_true', help=f"also enumerate every rotation (n <= {MAX_EXACT_N})")
        self.app.add_command('estimate-x', self.estimate_x)

    async def run(self, args):
        """
        Simulates the resolved scenario, prints its report and optionally
        writes it with --out.

        Args:
            args: Parsed command line arguments.
        """
        _, config = resolve_from_args(args)
        self.logger.info(f"Running {config.synchronizer} scenario: {config.to_dict()}")
        report = await asyncio.to_thread(run_scenario, config)

        view = ReportView(report, self.app.page_size)
        if args.page:
            view.current_page = min(max(args.page, 1), view.total_pages()) - 1
            self.app.output(view.render_page())
        else:
            self.app.output(view.render_page())
            while view.next_page():
                self.app.output(view.render_page())

        if args.out:
            emit(report, args.out, args.format)
        return 0

    async def presets(self, args):
        self.app.output(format_table(("name", "type", "description"), list_presets()))
        return 0

    async def estimate_x(self, args):
        experiment = get_experiment(args.experiment)
        n = args.n if args.n is not None else experiment.n
        f = args.f if args.f is not None else experiment.f
        trials = args.trials if args.trials is not None else experiment.trials

        estimate = await asyncio.to_thread(estimate_x, n, f, trials, args.seed)
        lines = [
            f"n={n} f={f} trials={trials} seed={args.seed}",
            f"mean leaders enlisted: {estimate.mean_enlisted:.4f}",
            f"mean consecutive Byzantine leaders: {estimate.mean_byzantine_run:.4f}",
            f"independent draws would give: {estimate.geometric_mean:.4f}",
        ]
        if args.exact:
            if n > MAX_EXACT_N:
                raise ConfigError(f"--exact enumerates n! rotations, n must be at most {MAX_EXACT_N}")
            lines.append(f"exact mean over all rotations: {format_time(exact_enlisted_leaders_mean(n, f))}")
        self.app.output("\n".join(lines))
        return 0


async def setup(app):
    await app.add_command_group(ScenarioCommands(app))
