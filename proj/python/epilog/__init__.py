"""Episodic memory retrieval and planning for LLM agents."""

from ._core import (
    CompletionBackend,
    Embedding,
    EmbeddingProvider,
    Environment,
    EnvStep,
    EpilogError,
    EpisodeLog,
    EpisodeResult,
    HashingProvider,
    LogFilter,
    MemoryStore,
    MiniHouseEnv,
    Observation,
    Provenance,
    QueryState,
    RetrievalEvent,
    RetrievalKey,
    RetrievedExperience,
    RunConfig,
    ScoreWeights,
    ScriptedBackend,
    ScriptedRule,
    Step,
    TaskSpec,
    WindowPolicy,
    __version__,
    build_prompt,
    cosine,
    extract_window,
    format_key,
    key_similarity,
    load_house_tasks,
    load_script,
    parse_agent_output,
    parse_key_line,
    retrieve,
    run_episode,
    run_trials,
    score_log,
)

__all__ = [
    "CompletionBackend",
    "Embedding",
    "EmbeddingProvider",
    "Environment",
    "EnvStep",
    "EpilogError",
    "EpisodeLog",
    "EpisodeResult",
    "HashingProvider",
    "LogFilter",
    "MemoryStore",
    "MiniHouseEnv",
    "Observation",
    "Provenance",
    "QueryState",
    "RetrievalEvent",
    "RetrievalKey",
    "RetrievedExperience",
    "RunConfig",
    "ScoreWeights",
    "ScriptedBackend",
    "ScriptedRule",
    "Step",
    "TaskSpec",
    "WindowPolicy",
    "__version__",
    "build_prompt",
    "cosine",
    "extract_window",
    "format_key",
    "key_similarity",
    "load_house_tasks",
    "load_script",
    "parse_agent_output",
    "parse_key_line",
    "retrieve",
    "run_episode",
    "run_trials",
    "score_log",
]
