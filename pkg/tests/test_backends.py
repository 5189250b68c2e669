import json
import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from promptloom.backends import (
    BackendConfig,
    CompletionRequest,
    HttpBackend,
    OracleBackend,
    ScriptedBackend,
    backend_from_config,
    inject_failure,
)
from promptloom.errors import (
    BackendError,
    BackendTimeoutError,
    EmptyCompletionError,
    FixtureMissError,
    HttpError,
    SchemaError,
)

ONE_SHOT_PROMPT = (
    "Music request: calm music to work to\n"
    "Decade: 1970s\n"
    "Artist: Brian Eno\n"
    "Description: Ambient pioneer.\n"
    "\n"
    "Music request: hip hop\n"
    "Decade: 1990s"
)


def req(prompt, temperature=0.0, stop_word=None, max_tokens=256):
    return CompletionRequest(prompt, temperature, stop_word, max_tokens)


# -- oracle -------------------------------------------------------------------


def test_oracle_is_deterministic():
    backend = OracleBackend()
    assert backend.complete(req(ONE_SHOT_PROMPT)) == backend.complete(req(ONE_SHOT_PROMPT))


def test_oracle_continues_the_one_shot_shape():
    completion = OracleBackend().complete(req(ONE_SHOT_PROMPT))
    assert "Artist:" in completion
    assert "Description:" in completion
    assert completion.index("Artist:") < completion.index("Description:")
    # tail labels that are already filled are not regenerated
    assert "Music request:" not in completion
    assert "Decade:" not in completion


def test_oracle_completes_a_trailing_cue_line():
    prompt = "Suggested artist: Brian Eno\n\nSuggested artist:"
    completion = OracleBackend().complete(req(prompt))
    assert completion.startswith(" ")
    assert "Suggested artist:" not in completion


def test_oracle_never_echoes_the_prompt():
    for prompt in (ONE_SHOT_PROMPT, "write a poem", "A: 1\n\nA:"):
        completion = OracleBackend().complete(req(prompt))
        assert completion.strip()
        assert not completion.startswith(prompt)
        assert prompt not in completion


def test_oracle_temperature_changes_output_but_stays_pure():
    cold = OracleBackend().complete(req(ONE_SHOT_PROMPT, temperature=0.0))
    warm = OracleBackend().complete(req(ONE_SHOT_PROMPT, temperature=0.9))
    warm2 = OracleBackend().complete(req(ONE_SHOT_PROMPT, temperature=0.9))
    assert warm == warm2
    assert cold != warm


def test_oracle_appends_stop_word():
    completion = OracleBackend().complete(req(ONE_SHOT_PROMPT, stop_word="###"))
    assert completion.endswith("###")


def test_oracle_handles_unlabeled_prompts():
    completion = OracleBackend().complete(req("tell me something"))
    assert completion.strip()


# -- scripted -----------------------------------------------------------------


def test_scripted_exact_match():
    backend = ScriptedBackend({"p": "canned"})
    assert backend.complete(req("p")) == "canned"


def test_scripted_miss():
    with pytest.raises(FixtureMissError):
        ScriptedBackend({"p": "canned"}).complete(req("other"))


def test_scripted_empty_completion_is_an_error():
    with pytest.raises(EmptyCompletionError):
        ScriptedBackend({"p": "  \n"}).complete(req("p"))


def test_scripted_from_file(tmp_path):
    path = tmp_path / "fixtures.json"
    path.write_text(json.dumps([{"prompt": "p", "completion": "c"}]))
    assert ScriptedBackend.from_file(path).complete(req("p")) == "c"


def test_scripted_from_file_rejects_bad_shapes(tmp_path):
    path = tmp_path / "fixtures.json"
    path.write_text(json.dumps({"prompt": "p"}))
    with pytest.raises(SchemaError):
        ScriptedBackend.from_file(path)


# -- failure injection ----------------------------------------------------------


def test_inject_timeout():
    with pytest.raises(BackendTimeoutError):
        inject_failure("timeout").complete(req("anything"))


def test_inject_extra_items_has_four_groups():
    completion = inject_failure("extra_items").complete(req("anything"))
    assert completion.count("Dish:") == 4
    assert completion.count("Description:") == 4


def test_inject_duplicate_items_repeats_a_value():
    completion = inject_failure("duplicate_items").complete(req("anything"))
    lines = completion.split("\n")
    assert lines[0].split(": ", 1)[1] == lines[1].split(": ", 1)[1]


def test_inject_malformed_split_omits_labels():
    completion = inject_failure("malformed_split").complete(req("anything"))
    assert "Dish:" in completion
    assert "Description:" not in completion


def test_inject_overlong_value_exceeds_sixty_chars():
    completion = inject_failure("overlong").complete(req("anything"))
    first_value = completion.split("\n")[0].split(": ", 1)[1]
    assert len(first_value) > 60


def test_inject_unknown_mode():
    with pytest.raises(ValueError):
        inject_failure("meltdown")


# -- http ---------------------------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    behavior = "ok"

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        if self.behavior == "stall":
            time.sleep(2)
            return
        if self.behavior == "reject":
            self.send_response(401)
            self.end_headers()
            self.wfile.write(b"no key")
            return
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        text = f" echo-free answer to {len(body['prompt'])} chars"
        self.wfile.write(json.dumps({"choices": [{"text": text}]}).encode())

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/v1/completions"
    server.shutdown()


def test_http_backend_success(stub_server):
    _Handler.behavior = "ok"
    backend = HttpBackend(stub_server, timeout=5.0)
    completion = backend.complete(req("hello", stop_word="##"))
    assert completion.startswith(" echo-free answer")


def test_http_backend_4xx(stub_server):
    _Handler.behavior = "reject"
    backend = HttpBackend(stub_server, timeout=5.0)
    with pytest.raises(HttpError) as info:
        backend.complete(req("hello"))
    assert info.value.status == 401


def test_http_backend_timeout_is_honored(stub_server):
    _Handler.behavior = "stall"
    backend = HttpBackend(stub_server, timeout=0.5)
    started = time.monotonic()
    with pytest.raises(BackendTimeoutError):
        backend.complete(req("hello"))
    assert time.monotonic() - started < 1.5
    _Handler.behavior = "ok"


def test_http_backend_connection_error_after_retry():
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        free_port = probe.getsockname()[1]
    backend = HttpBackend(f"http://127.0.0.1:{free_port}/", timeout=1.0)
    with pytest.raises(BackendError):
        backend.complete(req("hello"))


def test_api_key_env_is_read(stub_server, monkeypatch):
    _Handler.behavior = "ok"
    monkeypatch.setenv("CUSTOM_KEY_ENV", "sekrit")
    backend = HttpBackend(stub_server, api_key_env="CUSTOM_KEY_ENV", timeout=5.0)
    assert backend.complete(req("x"))


# -- config -------------------------------------------------------------------


def test_backend_from_config_oracle():
    assert isinstance(backend_from_config(BackendConfig(kind="oracle")), OracleBackend)


def test_backend_from_config_scripted(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps([{"prompt": "p", "completion": "c"}]))
    backend = backend_from_config(BackendConfig(kind="scripted", fixture_path=str(path)))
    assert isinstance(backend, ScriptedBackend)


def test_backend_config_invariants():
    with pytest.raises(SchemaError):
        BackendConfig(kind="http")
    with pytest.raises(SchemaError):
        BackendConfig(kind="oracle", timeout=0)
    with pytest.raises(SchemaError):
        BackendConfig(kind="carrier-pigeon")
