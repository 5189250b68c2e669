"""Entry point for running the service with uvicorn."""

from __future__ import annotations

import socket
from pathlib import Path

import uvicorn

from ..backends import BackendConfig, backend_from_config
from ..errors import BindError
from .app import create_app
from .state import SessionStore

DEFAULT_PORT = 7878
DEFAULT_HOST = "127.0.0.1"


def check_port_free(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise BindError(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()


def serve(
    port: int = DEFAULT_PORT,
    host: str = DEFAULT_HOST,
    backend_config: BackendConfig | None = None,
    state_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> None:
    """Run the service until interrupted. Binds to loopback by default."""
    check_port_free(host, port)
    backend = backend_from_config(backend_config or BackendConfig(kind="oracle"))
    store = SessionStore(backend=backend, state_dir=state_dir)
    app = create_app(store, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
