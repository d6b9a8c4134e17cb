"""Order-preserving map over chunks, in-process or on a process pool."""

from __future__ import annotations

import collections
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Iterable, Iterator

_NO_STATE = object()
_worker_state: Any = _NO_STATE


def _install(state):
    global _worker_state
    _worker_state = state


def _call(func, item):
    if _worker_state is _NO_STATE:
        return func(item)
    return func(_worker_state, item)


def ordered_map(
    func: Callable,
    items: Iterable,
    workers: int = 1,
    state: Any = _NO_STATE,
) -> Iterator:
    """Yield ``func(item)`` (or ``func(state, item)``) in input order.

    With ``workers > 1`` items are dispatched to a process pool; ``state`` is
    shipped once per worker. At most ``2 * workers`` items are in flight, so
    memory stays bounded for streamed input.
    """
    if workers <= 1:
        for item in items:
            yield func(item) if state is _NO_STATE else func(state, item)
        return
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_install, initargs=(state,)
    ) as pool:
        pending = collections.deque()
        for item in items:
            pending.append(pool.submit(_call, func, item))
            if len(pending) >= 2 * workers:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()
