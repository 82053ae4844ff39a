"""Model access: gateway, backends, redaction, lexicon."""

from hotline_risk.llm.gateway import (
    AuthError,
    BackendRefusal,
    ChatRequest,
    ChatResponse,
    Gateway,
    GatewayError,
    HttpBackend,
    TransportError,
)
from hotline_risk.llm.lexicon import RiskLexicon
from hotline_risk.llm.mock import MockBackend, UnknownPromptShape, mock_complete
from hotline_risk.llm.redaction import RedactionReport, Redactor, SpanKind

__all__ = [
    "AuthError",
    "BackendRefusal",
    "ChatRequest",
    "ChatResponse",
    "Gateway",
    "GatewayError",
    "HttpBackend",
    "MockBackend",
    "RedactionReport",
    "Redactor",
    "RiskLexicon",
    "SpanKind",
    "TransportError",
    "UnknownPromptShape",
    "mock_complete",
]
