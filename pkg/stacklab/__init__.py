from .models import (
    GameInstance, ActionPair, ResponseFunction, ManipulationPlan, EquilibriumResult,
    GapProfile, RoundRecord, RunMetrics, Player, NoiseMode, InformationSetting,
    TraceGranularity, GAP_SENTINEL, SERIES_METRICS,
)
from .exceptions import (
    StackLabError, ConfigError, InformationModelError, ContractViolation,
    GameGenerationError, ManipulationError, DegenerateGameError, EnumerationLimitError,
    ReportWriteError,
)
from .rng import RngStream, spawn_streams
from .game import (
    BUILTIN_GAMES, TABLE1, APPENDIX_A1, sample_reward, best_response, worst_response,
    best_response_function, worst_response_function, stackelberg_equilibrium, gap_profile,
    random_game, load_game, save_game, induced_leader_rewards, leader_argmax_set, is_qualified,
)
from .oracles import enumerate_manipulations, best_manipulation_oracle, pessimistic_oracle
from .learners import Exp3Leader, UcbeLeader, UcbLeader, LEADER_REGISTRY
from .followers import (
    FollowerBanditState, UcbFollower, BestResponseFollower, FbmFollower, FmucbFollower,
    PessimisticFbmFollower, FOLLOWER_REGISTRY, fbm_solve, fmucb_plan, pessimistic_fbm_solve,
)
from .config import SimConfig, LeaderSpec, FollowerSpec, GameSource, parse_config
from .engine import run_game, batch_run, nonconvergence_probe, BatchReport, RunResult
from .presets import load_presets, run_preset, ExperimentPreset
from .reporter import write_trace_csv, write_summary_csv, export_json, export_excel
