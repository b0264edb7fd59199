# This file is part of viewsync.
#
# viewsync is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# viewsync is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with viewsync. If not, see <https://www.gnu.org/licenses/>.

import argparse
import asyncio
import importlib
import logging
import os
import sys

from dotenv import load_dotenv

from src.core.errors import ConfigError, EmitError, InvariantViolation
from src.utility.helpers import env_int

load_dotenv()
logging.basicConfig(level=(os.getenv('VIEWSYNC_LOG_LEVEL') or 'INFO').upper())
logger = logging.getLogger('main')

EXTENSIONS = ('src.commands.scenario_commands', 'src.commands.sweep_commands')


class ViewSyncApp:
    """
    Command line application. Command groups register their subcommands
    through ``add_command_group`` when their extension module is loaded.

    Attributes:
        parser (argparse.ArgumentParser): Top level parser.
        commands (dict): Subcommand name -> coroutine taking the parsed args.
        page_size (int): Rows per rendered page (VIEWSYNC_PAGE_SIZE).
        workers (int): Default sweep concurrency (VIEWSYNC_WORKERS).
    """
    def __init__(self, stream=None):
        self.parser = argparse.ArgumentParser(prog='viewsync',
                                              description="Simulate and audit Byzantine view synchronizers.")
        self.subparsers = self.parser.add_subparsers(dest='command', required=True)
        self.commands = {}
        self.groups = []
        self.page_size = env_int('VIEWSYNC_PAGE_SIZE', 20)
        self.workers = env_int('VIEWSYNC_WORKERS', 1)
        self.stream = stream or sys.stdout

    async def load_extension(self, name):
        module = importlib.import_module(name)
        await module.setup(self)

    async def add_command_group(self, group):
        group.register(self.subparsers)
        self.groups.append(group)

    def add_command(self, name, handler):
        self.commands[name] = handler

    def output(self, text):
        print(text, file=self.stream)

    async def invoke(self, argv=None):
        args = self.parser.parse_args(argv)
        logger.info(f"Command received: {args.command}")
        try:
            return await self.commands[args.command](args)
        except Exception as error:
            return self.on_command_error(args.command, error)

    def on_command_error(self, command, error):
        """
        Global error handler for every command.

        Args:
            command (str): The subcommand that failed.
            error (Exception): What it raised.

        Returns:
            int: Exit code, 2 for rejected configuration and 1 otherwise.
        """
        if isinstance(error, ConfigError):
            logger.warning(f"Rejected configuration for {command}: {error}")
            print(f"error: {error}", file=sys.stderr)
            return 2
        if isinstance(error, EmitError):
            logger.error(f"Could not write output of {command}: {error}")
            print(f"error: cannot write {error.path}", file=sys.stderr)
            return 1
        if isinstance(error, InvariantViolation):
            logger.error(f"Invariant violated in {command}: {error}")
            print(f"internal error: {error}", file=sys.stderr)
            return 1
        logger.exception(f"Unhandled error in command {command}: {error}")
        print("An error occurred while processing the command.", file=sys.stderr)
        return 1


async def main(argv=None, stream=None):
    """
    Loads the command groups and runs one command.

    Args:
        argv (list): Arguments without the program name, sys.argv by default.
        stream: Where rendered output goes, stdout by default.

    Returns:
        int: The process exit code.

    Raises:
        Exception: If a command group fails to load.
    """
    app = ViewSyncApp(stream)
    logger.info(f"Configured page size: {app.page_size}")
    logger.info(f"Configured sweep workers: {app.workers}")

    try:
        for extension in EXTENSIONS:
            await app.load_extension(extension)
        logger.info("Successfully loaded all command groups")
    except Exception as e:
        logger.error(f"Failed to load command groups: {e}")
        raise

    return await app.invoke(argv)


def run():
    sys.exit(asyncio.run(main()))


if __name__ == "__main__":
    run()
