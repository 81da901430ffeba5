import threading
from typing import Any, Callable

from core.logger_config import logger


class CalculationThread(threading.Thread):
    def __init__(self, calculation_func: Callable[..., Any], *args, **kwargs):
        super().__init__(daemon=True)
        self.calculation_func = calculation_func
        self.args = args
        self.kwargs = kwargs
        self.result: Any = None
        self.error: BaseException | None = None

    def run(self):
        try:
            self.result = self.calculation_func(*self.args, **self.kwargs)
        except Exception as e:  # pylint: disable=broad-except
            logger.error(f"Ошибка в потоке {self.name}: {e}")
            self.error = e

    def result_ready(self) -> Any:
        self.join()
        if self.error is not None:
            raise self.error
        return self.result
