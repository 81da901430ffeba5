import sys
from typing import Protocol


class Console(Protocol):
    def log_message(self, message: str) -> None:
        ...


class StdoutConsole:
    def log_message(self, message: str) -> None:
        sys.stdout.write(message + '\n')


class CollectingConsole:
    def __init__(self):
        self.messages: list[str] = []

    def log_message(self, message: str) -> None:
        self.messages.append(message)

    def text(self) -> str:
        return ''.join(message + '\n' for message in self.messages)


class LoggerConsole:
    _instance = None
    _console: Console | None = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(LoggerConsole, cls).__new__(cls)
        return cls._instance

    @classmethod
    def set_console(cls, console: Console | None):
        cls._console = console

    @classmethod
    def log(cls, message: str):
        if cls._console is not None:
            cls._console.log_message(message)
