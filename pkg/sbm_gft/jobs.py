# -*- coding: UTF8 -*-

"""
This is a small job system.
Every job carries an index ; results are always returned in index order,
whatever the order in which the pool finished them.
"""

import logging

from typing import Any, Callable, List, Optional
from concurrent.futures import ThreadPoolExecutor

from .config import Config


class Job:

    def __init__(self, index: int, action: Callable, *args, **kwargs):
        self.index = index
        self.action = action
        self.args = args
        self.kwargs = kwargs

    def run_action(self) -> Any:
        return self.action(*self.args, **self.kwargs)


class Jobs:

    def __init__(self, jobs: List[Job], workers: Optional[int] = None):
        self.jobs = sorted(jobs, key=lambda job: job.index)
        self.workers = workers if workers is not None else Config.workers

    def __len__(self) -> int:
        return len(self.jobs)

    def run_all(self) -> List[Any]:
        """
        Runs all the jobs and returns their results, ordered by job index.
        The first exception raised by a job is re-raised here.

        :return List[Any]: One result per job.
        """
        if self.workers <= 1 or len(self.jobs) <= 1:
            return [job.run_action() for job in self.jobs]

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [pool.submit(job.run_action) for job in self.jobs]
            results = []
            for job, future in zip(self.jobs, futures):
                try:
                    results.append(future.result())
                except Exception:
                    logging.error(f'Job {job.index} failed')
                    for other in futures:
                        other.cancel()
                    raise
        return results
