"""
Brute-force manipulation oracles.
Enumerate every response function F: [A] -> [B] (B^A of them) and solve the
strict and pessimistic manipulation problems exactly. Used as ground truth for
the greedy solvers and for gap profiles.
"""

import logging
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .exceptions import DegenerateGameError, EnumerationLimitError
from .models import ActionPair, GameInstance, ManipulationPlan, ResponseFunction

logger = logging.getLogger(__name__)

ENUMERATION_CAP = 10**6
_CHUNK = 1 << 16

# (value, a, b, enumeration index); smaller is better after negating value.
_Key = Tuple[float, int, int, int]


def enumeration_size(game: GameInstance) -> int:
    return game.B ** game.A


def _check_cap(game: GameInstance, cap: int):
    size = enumeration_size(game)
    if size > cap:
        raise EnumerationLimitError(
            f"{game.A}x{game.B} game has B^A = {size} response functions (cap {cap})"
        )


def _iter_chunks(game: GameInstance) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """
    Yield (indices, F) blocks. Row i of F is the response function with
    enumeration index indices[i]; leader action 0 is the most significant digit.
    """
    A, B = game.A, game.B
    total = enumeration_size(game)
    place = B ** np.arange(A - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        yield idx, (idx[:, None] // place[None, :]) % B


def _evaluate(game: GameInstance, F: np.ndarray):
    """Per-F leader rewards μ_l(a, F(a)), follower rewards and argmax mask Q(F)."""
    rows = np.arange(game.A)[None, :]
    leader = game.mu_l[rows, F]
    follower = game.mu_f[rows, F]
    in_q = leader == leader.max(axis=1, keepdims=True)
    return leader, follower, in_q


def _plan_from(F_row: np.ndarray, a: int, value: float) -> ManipulationPlan:
    response = ResponseFunction(tuple(int(b) for b in F_row))
    return ManipulationPlan(response=response, target=ActionPair(int(a), response[int(a)]),
                            value=float(value))


def _pick(values: np.ndarray, targets_a: np.ndarray, targets_b: np.ndarray,
          idx: np.ndarray) -> Optional[int]:
    """Position of the best entry: highest value, then lowest (a, b), then lowest F index."""
    if values.size == 0:
        return None
    order = np.lexsort((idx, targets_b, targets_a, -values))
    return int(order[0])


def enumerate_manipulations(game: GameInstance, cap: int = ENUMERATION_CAP
                            ) -> List[Tuple[ManipulationPlan, float]]:
    """
    Every response function whose induced leader argmax is unique, as
    (plan, follower value) in enumeration order.
    """
    _check_cap(game, cap)
    out: List[Tuple[ManipulationPlan, float]] = []
    for idx, F in _iter_chunks(game):
        _, follower, in_q = _evaluate(game, F)
        unique = in_q.sum(axis=1) == 1
        for row in np.flatnonzero(unique):
            a = int(np.argmax(in_q[row]))
            value = float(follower[row, a])
            out.append((_plan_from(F[row], a, value), value))
    return out


def best_manipulation_oracle(game: GameInstance, cap: int = ENUMERATION_CAP) -> ManipulationPlan:
    """Follower-optimal strictly qualified manipulation (lowest (a, b) on ties)."""
    _check_cap(game, cap)
    best: Optional[_Key] = None
    best_plan: Optional[ManipulationPlan] = None
    for idx, F in _iter_chunks(game):
        _, follower, in_q = _evaluate(game, F)
        unique = in_q.sum(axis=1) == 1
        if not unique.any():
            continue
        rows = np.flatnonzero(unique)
        ta = np.argmax(in_q[rows], axis=1)
        tb = F[rows, ta]
        values = follower[rows, ta]
        pos = _pick(values, ta, tb, idx[rows])
        key = (-float(values[pos]), int(ta[pos]), int(tb[pos]), int(idx[rows][pos]))
        if best is None or key < best:
            best = key
            best_plan = _plan_from(F[rows[pos]], ta[pos], values[pos])
    if best_plan is None:
        raise DegenerateGameError(f"{game.name}: no response function has a unique leader argmax")
    logger.debug("oracle best manipulation on %s: %s value %.4f",
                 game.name, best_plan.target, best_plan.value)
    return best_plan


def pessimistic_oracle(game: GameInstance, cap: int = ENUMERATION_CAP
                       ) -> Tuple[ManipulationPlan, float]:
    """
    max over F of min over Q(F) of μ_f(a, F(a)). The plan's target is the
    follower-worst element of Q(F), lowest index on ties.
    """
    _check_cap(game, cap)
    best: Optional[_Key] = None
    best_plan: Optional[ManipulationPlan] = None
    for idx, F in _iter_chunks(game):
        _, follower, in_q = _evaluate(game, F)
        masked = np.where(in_q, follower, np.inf)
        ta = np.argmin(masked, axis=1)
        values = masked[np.arange(len(idx)), ta]
        tb = F[np.arange(len(idx)), ta]
        pos = _pick(values, ta, tb, idx)
        key = (-float(values[pos]), int(ta[pos]), int(tb[pos]), int(idx[pos]))
        if best is None or key < best:
            best = key
            best_plan = _plan_from(F[pos], ta[pos], values[pos])
    return best_plan, float(best_plan.value)
