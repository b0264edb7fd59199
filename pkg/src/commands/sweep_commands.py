# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

import logging

from src.commands.scenario_commands import add_scenario_arguments, resolve_from_args
from src.harness.emit import emit
from src.harness.fitting import preferred_order
from src.harness.runner import SWEEP_AXES, run_sweep_async
from src.utility.helpers import parse_int, parse_values
from src.utility.views import SweepView


class SweepCommands:
    """
    Seeded sweeps over n, the number of faults, or the seed.
    """
    def __init__(self, app):
        self.app = app
        self.logger = logging.getLogger('sweep_commands')

    def register(self, subparsers):
        sweep = subparsers.add_parser('sweep', help="run a scenario once per axis value and fit the growth")
        add_scenario_arguments(sweep)
        sweep.add_argument('--axis', choices=SWEEP_AXES, help="swept parameter, defaults to the preset's axis")
        sweep.add_argument('--values', help="comma separated axis values, defaults to the preset's values")
        sweep.add_argument('--template', help="adversary with a {t} placeholder for t sweeps")
        sweep.add_argument('--workers', type=int, help="points simulated concurrently (VIEWSYNC_WORKERS)")
        self.app.add_command('sweep', self.sweep)

    async def sweep(self, args):
        """
        Runs the sweep, prints the paged table with its fits and optionally
        writes one row per point with --out.

        Args:
            args: Parsed command line arguments.
        """
        preset, base = resolve_from_args(args)
        axis = args.axis or (preset.axis if preset else 'n')
        if args.values:
            values = [parse_int(value, 'values') for value in parse_values(args.values)]
        elif preset is not None and (args.axis is None or args.axis == preset.axis):
            values = list(preset.values)
        else:
            values = [base.n] if axis == 'n' else [base.seed] if axis == 'seed' else [1]
        template = args.template or (preset.adversary_template if preset else '')
        self.logger.info(f"Sweeping {axis} over {values} with {args.workers or self.app.workers} workers")

        table = await run_sweep_async(base, axis, values, args.workers or self.app.workers, template)

        view = SweepView(table, self.app.page_size)
        self.app.output(view.render_page())
        while view.next_page():
            self.app.output(view.render_page())
        if preset is not None and preset.expected_order and 'communication' in table.fits:
            observed = preferred_order(table.fits['communication'])
            if observed != preset.expected_order:
                self.logger.warning(f"Communication fits {observed} growth best, {preset.name} expects {preset.expected_order}")

        if args.out:
            emit(table, args.out, args.format)
        return 0


async def setup(app):
    await app.add_command_group(SweepCommands(app))
