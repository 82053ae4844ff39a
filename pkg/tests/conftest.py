from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from hotline_risk.domain import Speaker, TranscriptDocument, Utterance
from hotline_risk.llm import Gateway, MockBackend, Redactor
from hotline_risk.llm.lexicon import RiskLexicon


class StubServer:
    """Chat-completions stub that replays a script of (status, body, delay) steps.

    The last step repeats once the script runs out. Received request bodies
    and headers are kept for inspection.
    """

    def __init__(self, script):
        self.script = list(script)
        self.requests: list[dict] = []
        self.headers: list[dict] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802
                length = int(self.headers.get("Content-Length", 0))
                stub.requests.append(json.loads(self.rfile.read(length) or b"{}"))
                stub.headers.append(dict(self.headers))
                idx = min(len(stub.requests) - 1, len(stub.script) - 1)
                status, body, delay = stub.script[idx]
                if delay:
                    time.sleep(delay)
                payload = body if isinstance(body, bytes) else json.dumps(body).encode()
                try:
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(payload)))
                    self.end_headers()
                    self.wfile.write(payload)
                except (BrokenPipeError, ConnectionResetError):
                    pass

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.server.daemon_threads = True
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}/v1"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()


def completion(text: str) -> dict:
    return {"choices": [{"index": 0, "message": {"role": "assistant", "content": text}}]}


@pytest.fixture
def stub_server():
    servers = []

    def start(script):
        server = StubServer(script).__enter__()
        servers.append(server)
        return server

    yield start
    for server in servers:
        server.__exit__(None, None, None)


@pytest.fixture
def lexicon() -> RiskLexicon:
    return RiskLexicon.default()


@pytest.fixture
def mock_gateway(lexicon) -> Gateway:
    gw = Gateway(MockBackend(lexicon), Redactor(names=["张伟", "Alice Smith"], addresses=["回龙观东大街"]))
    gw.record_history = True
    return gw


def make_doc(texts, speakers=None) -> TranscriptDocument:
    speakers = speakers or [Speaker.CALLER] * len(texts)
    return TranscriptDocument.from_utterances([Utterance(s, t) for s, t in zip(speakers, texts)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
