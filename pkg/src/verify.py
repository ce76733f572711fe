"""Differential suite: compiled programs against the symbolic references on random instances."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.config import DEFAULT_MAX_STEPS, VERIFY_DEFAULT_COUNT
from src.errors import MNCError
from src.programs.base import BaseProgram

logger = logging.getLogger(__name__)


def _check_one(builder: BaseProgram, case: int, instance, max_steps: int) -> dict:
    try:
        trace = builder.execute(instance, max_steps, check=True)
        problems = builder.differential(instance, trace)
        steps = trace.steps
    except MNCError as e:
        problems, steps = [f"{type(e).__name__}: {e}"], None
    return {"case": case, "instance": instance, "steps": steps, "problems": problems}


def run_verify(
    builder: BaseProgram,
    seed: int = 0,
    count: int = VERIFY_DEFAULT_COUNT,
    max_steps: int = DEFAULT_MAX_STEPS,
    threads: int = 1,
) -> dict:
    """Run count random instances (plus the program's default instance, if any).

    Returns a summary dict with counts and the failing cases.
    """
    rng = np.random.default_rng(seed)
    instances = []
    default = builder.default_instance()
    if default is not None:
        instances.append(default)
    instances += [builder.random_instance(rng) for _ in range(count)]

    # Compile every program before fanning out; workers then only read the compile cache.
    for instance in instances:
        try:
            builder.program_for(instance)
        except MNCError:
            pass  # reported per case by _check_one

    summary = {"program": builder.NAME, "seed": seed, "total": len(instances), "passed": 0, "failures": []}
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda item: _check_one(builder, item[0], item[1], max_steps), enumerate(instances))
            )
    else:
        results = [_check_one(builder, k, inst, max_steps) for k, inst in enumerate(instances)]

    for result in results:
        if result["problems"]:
            summary["failures"].append(result)
            logger.error(f"[{builder.NAME}] case {result['case']} failed: {result['problems'][0]}")
        else:
            summary["passed"] += 1

    logger.info(f"[{builder.NAME}] verify: {summary['passed']}/{summary['total']} exact matches")
    return summary
