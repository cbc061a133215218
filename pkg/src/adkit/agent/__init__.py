"""Agent loop: prompt assembly, reply protocol, session state, metrics."""

from .clients import DEFAULT_TEMPERATURE, MockModelClient, ModelClient, make_raw_reply
from .metrics import CorpusMetrics, classify_incongruence, is_pure_question, score_corpus
from .orchestrator import (
    CommandResult,
    ConversationTurn,
    Event,
    LineMoved,
    ResponseRejectedError,
    ScriptReplaced,
    SessionState,
    SuggestionPending,
    TextSpoken,
    TimestampJumped,
    apply_response,
    event_to_json_obj,
    repair_min_gaps,
    replay_transcript,
    run_command,
)
from .prompt import PLACEHOLDERS, TEMPLATE_VERSION, assemble_prompt, load_template, render_history
from .protocol import AgentResponse, REQUIRED_FIELDS, SchemaError, parse_response

__all__ = [
    "AgentResponse",
    "CommandResult",
    "ConversationTurn",
    "CorpusMetrics",
    "DEFAULT_TEMPERATURE",
    "Event",
    "LineMoved",
    "MockModelClient",
    "ModelClient",
    "PLACEHOLDERS",
    "REQUIRED_FIELDS",
    "ResponseRejectedError",
    "SchemaError",
    "ScriptReplaced",
    "SessionState",
    "SuggestionPending",
    "TextSpoken",
    "TimestampJumped",
    "TEMPLATE_VERSION",
    "apply_response",
    "assemble_prompt",
    "classify_incongruence",
    "event_to_json_obj",
    "is_pure_question",
    "load_template",
    "make_raw_reply",
    "parse_response",
    "render_history",
    "repair_min_gaps",
    "replay_transcript",
    "run_command",
    "score_corpus",
]
