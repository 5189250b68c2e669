from .app import create_app
from .server import serve
from .state import SessionStore

__all__ = ["create_app", "serve", "SessionStore"]
