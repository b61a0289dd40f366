from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, List, Optional, Sequence
from rich.progress import Progress
import logging
import os


def get_logger(name: str) -> logging.Logger:
    """
    Return a coherelab logger with a single stream handler.

    Level defaults to INFO and can be overridden with the
    COHERELAB_LOG_LEVEL environment variable.
    """
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        fmt = logging.Formatter(
            "%(asctime)s [%(levelname)s] %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        )
        handler.setFormatter(fmt)
        logger.addHandler(handler)
        logger.setLevel(os.getenv("COHERELAB_LOG_LEVEL", "INFO").upper())
    logger.propagate = False
    return logger


class BaseRunner:
    """
    Shared plumbing for the services that fan work out to threads.

    Holds the `LabConfig`, a named logger and `map_parallel`, which runs
    independent tasks on a thread pool capped by `config.threads` and
    returns the results in submission order.

    Attributes
    ----------
    config : LabConfig
        Resolved runtime configuration.
    logger : logging.Logger
        Logger named after the concrete service.
    """

    logger_name = "coherelab"

    def __init__(
        self,
        *,
        config
    ):
        self.config = config
        self.logger = get_logger(self.logger_name)

    def map_parallel(
        self,
        fn: Callable[[Any], Any],
        items: Sequence[Any],
        *,
        description: str = "Working...",
        show_progress: Optional[bool] = None
    ) -> List[Any]:
        """
        Apply `fn` to every item concurrently.

        Parameters
        ----------
        fn : callable
            Pure function of one item.
        items : sequence
            Work items.
        description : str
            Progress bar label.
        show_progress : bool, optional
            Defaults to `config.progress`.

        Returns
        -------
        list
            `fn(item)` for each item, in the order of `items`.
        """
        if not items:
            return []
        if show_progress is None:
            show_progress = self.config.progress

        results: List[Any] = [None] * len(items)
        workers = max(1, min(self.config.threads, len(items)))

        with Progress(disable=not show_progress) as progress:
            task = progress.add_task(f"[cyan]{description}", total=len(items))
            with ThreadPoolExecutor(max_workers=workers) as ex:
                futs = {ex.submit(fn, item): i for i, item in enumerate(items)}
                for fut in as_completed(futs):
                    # Exceptions propagate; callers decide what is inconclusive
                    results[futs[fut]] = fut.result()
                    progress.advance(task, 1)
        return results
