import sys

from cli.commands import run
from core.logger_console import LoggerConsole, StdoutConsole


def main():
    LoggerConsole.set_console(StdoutConsole())
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
