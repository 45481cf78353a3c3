from .base import BaseFollower, FollowerBanditState
from .ucb import UcbFollower, BestResponseFollower
from .manipulation import (
    FbmFollower, PessimisticFbmFollower, FmucbFollower,
    fbm_solve, fmucb_plan, pessimistic_fbm_solve, pessimistic_worst_responses,
)

ALL_FOLLOWERS = [UcbFollower, FbmFollower, FmucbFollower, PessimisticFbmFollower, BestResponseFollower]
FOLLOWER_REGISTRY = {cls.strategy: cls for cls in ALL_FOLLOWERS}
