"""Exception hierarchy shared across the package.

Configuration problems surface as exceptions; incompatibilities discovered
while running a prompt surface as diagnostics instead (see splitter module).
"""


class PromptloomError(Exception):
    """Base class for all package errors."""


class DocumentError(PromptloomError):
    """Base class for document model errors."""


class ParseError(DocumentError):
    """Input bytes are not valid JSON."""


class SchemaError(DocumentError):
    """JSON is valid but does not conform to the expected schema."""


class DuplicateIdError(DocumentError):
    """Two elements in one document share an id."""


class UnknownElementError(DocumentError):
    """An element id does not exist in the document."""


class NotATextElementError(DocumentError):
    """The id names a trigger where a text element is required."""


class StaleBindingError(PromptloomError):
    """A bound element disappeared between validation and render."""


class UnboundTriggerError(PromptloomError):
    """The trigger is not assigned to any prompt."""


class BackendError(PromptloomError):
    """Base class for completion backend failures."""


class BackendTimeoutError(BackendError):
    """The backend did not answer within its deadline."""


class HttpError(BackendError):
    """The completions endpoint answered with a non-success status."""

    def __init__(self, status: int, body_excerpt: str = ""):
        super().__init__(f"HTTP {status}: {body_excerpt[:200]}")
        self.status = status
        self.body_excerpt = body_excerpt[:200]


class FixtureMissError(BackendError):
    """A scripted backend has no completion for the rendered prompt."""


class EmptyCompletionError(BackendError):
    """The backend returned an empty or whitespace-only continuation."""


class BindError(PromptloomError):
    """The service could not bind its listen port."""
