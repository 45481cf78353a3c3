from .base import BaseLeader
from .exp3 import Exp3Leader, softmax
from .ucb import UcbeLeader, UcbLeader, default_s0

ALL_LEADERS = [Exp3Leader, UcbeLeader, UcbLeader]
LEADER_REGISTRY = {cls.algorithm: cls for cls in ALL_LEADERS}
