import logging

LOGGER_NAME = 'sofic'


def configure_logger(log_level: int = logging.INFO) -> logging.Logger:
    logger_ = logging.getLogger(LOGGER_NAME)
    logger_.setLevel(log_level)
    if not logger_.handlers:
        handler = logging.StreamHandler()
        formatter = logging.Formatter(
            '%(asctime)s - %(levelname)s - %(filename)s : %(message)s', datefmt='%H:%M:%S')
        handler.setFormatter(formatter)
        logger_.addHandler(handler)
    return logger_


def set_verbosity(verbose: bool) -> None:
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)


logger = configure_logger()
