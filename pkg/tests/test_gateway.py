import httpx
import pytest

from hotline_risk.llm import (
    AuthError,
    BackendRefusal,
    ChatRequest,
    ChatResponse,
    Gateway,
    HttpBackend,
    TransportError,
)
from hotline_risk.llm.gateway import TRUNCATION_MARKER, truncate
from hotline_risk.prompts import TASK_PREDICT

from conftest import completion


def _backend(server, **kw):
    kw.setdefault("backoff_ms", 0)
    return HttpBackend(base_url=server.base_url, model="stub-model", api_key="sk-test", **kw)


REQ = ChatRequest(system_prompt=f"{TASK_PREDICT} sys", user_prompt="hello", max_output_chars=100)


def test_wire_format(stub_server):
    server = stub_server([(200, completion("fine"), 0)])
    resp = Gateway(_backend(server)).complete(REQ)
    assert resp.text == "fine"
    assert resp.attempt_count == 1
    body = server.requests[0]
    assert body["model"] == "stub-model"
    assert body["messages"] == [
        {"role": "system", "content": REQ.system_prompt},
        {"role": "user", "content": "hello"},
    ]
    assert body["temperature"] == 0.0
    assert server.headers[0]["Authorization"] == "Bearer sk-test"


def test_retries_500_twice_then_succeeds(stub_server):
    server = stub_server([(500, {"error": "x"}, 0), (500, {"error": "x"}, 0), (200, completion("ok"), 0)])
    resp = Gateway(_backend(server)).complete(REQ)
    assert resp.text == "ok"
    assert resp.attempt_count == 3
    assert len(server.requests) == 3


def test_backoff_is_exponential(stub_server):
    server = stub_server([(429, {}, 0), (503, {}, 0), (502, {}, 0), (200, completion("ok"), 0)])
    sleeps = []
    backend = _backend(server, backoff_ms=100, sleep=sleeps.append)
    assert Gateway(backend).complete(REQ).attempt_count == 4
    assert sleeps == [0.1, 0.2, 0.4]


def test_timeout_exhaustion(stub_server):
    server = stub_server([(200, completion("late"), 0.6)])
    backend = _backend(server, max_retries=2, timeout_ms=150)
    with pytest.raises(TransportError) as info:
        Gateway(backend).complete(REQ)
    assert info.value.attempt_count == 3


def test_auth_rejected_without_retry(stub_server):
    server = stub_server([(401, {"error": "bad key"}, 0)])
    with pytest.raises(AuthError):
        Gateway(_backend(server)).complete(REQ)
    assert len(server.requests) == 1


def test_missing_key_is_auth_error(stub_server, monkeypatch):
    monkeypatch.delenv("LLM_API_KEY", raising=False)
    server = stub_server([(200, completion("x"), 0)])
    backend = HttpBackend(base_url=server.base_url, model="m")
    with pytest.raises(AuthError):
        Gateway(backend).complete(REQ)
    assert server.requests == []


def test_key_taken_from_environment(stub_server, monkeypatch):
    monkeypatch.setenv("LLM_API_KEY", "from-env")
    server = stub_server([(200, completion("x"), 0)])
    Gateway(HttpBackend(base_url=server.base_url, model="m")).complete(REQ)
    assert server.headers[0]["Authorization"] == "Bearer from-env"


def test_client_error_not_retried(stub_server):
    server = stub_server([(400, {"error": "bad"}, 0)])
    with pytest.raises(TransportError):
        Gateway(_backend(server)).complete(REQ)
    assert len(server.requests) == 1


def test_malformed_payload(stub_server):
    server = stub_server([(200, {"nope": []}, 0)])
    with pytest.raises(TransportError):
        Gateway(_backend(server)).complete(REQ)


def test_connection_refused_is_transport_error():
    backend = HttpBackend(base_url="http://127.0.0.1:9/v1", model="m", api_key="k", max_retries=1, backoff_ms=0)
    with pytest.raises(TransportError) as info:
        Gateway(backend).complete(REQ)
    assert info.value.attempt_count == 2


def test_config_temperature_overrides_request(stub_server):
    server = stub_server([(200, completion("x"), 0)])
    Gateway(_backend(server, temperature=0.7)).complete(REQ)
    assert server.requests[0]["temperature"] == 0.7


class Fixed:
    backend_id = "fixed"

    def __init__(self, text):
        self.text = text

    def send(self, req):
        return ChatResponse(self.text, self.backend_id)


@pytest.mark.parametrize("text", ["", "   ", "I'm sorry, but I can't help with that."])
def test_refusals(text):
    with pytest.raises(BackendRefusal):
        Gateway(Fixed(text)).complete(REQ)


def test_truncation_keeps_within_limit():
    resp = Gateway(Fixed("x" * 500)).complete(REQ)
    assert len(resp.text) == 100
    assert resp.text.endswith(TRUNCATION_MARKER)
    assert len(resp.text) <= REQ.max_output_chars + len(TRUNCATION_MARKER)


def test_truncate_edges():
    assert truncate("abc", 3) == "abc"
    assert truncate("abcdef", 4) == "abcd"
    assert truncate("a" * 30, 13) == "a" + TRUNCATION_MARKER


def test_in_flight_limit():
    import threading
    import time

    active, peak = 0, 0
    lock = threading.Lock()

    class Slow:
        backend_id = "slow"

        def send(self, req):
            nonlocal active, peak
            with lock:
                active += 1
                peak = max(peak, active)
            time.sleep(0.02)
            with lock:
                active -= 1
            return ChatResponse("ok", "slow")

    gw = Gateway(Slow(), max_in_flight=2)
    threads = [threading.Thread(target=gw.complete, args=(REQ,)) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak == 2


def test_request_validation():
    with pytest.raises(ValueError):
        ChatRequest("s", "")
    with pytest.raises(ValueError):
        ChatRequest("s", "u", temperature=2.5)
