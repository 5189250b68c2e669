"""Response envelopes for the HTTP API.

Document, prompt and run payloads inside these envelopes follow the wire
schemas owned by the core modules (document/prompts/engine serializers);
they appear here as open dicts on purpose - the core is the single source
of truth for their shape.
"""

from __future__ import annotations

from pydantic import BaseModel


class CreateDocumentResponse(BaseModel):
    doc_id: str


class DocumentResponse(BaseModel):
    document: dict
    revision: int
    prompts: list[dict]
    # present after PUT: prompts that no longer validate against the new doc
    stale_prompts: list[str] = []


class ViolationModel(BaseModel):
    rule: str
    subject: str
    detail: str


class ValidationResponse(BaseModel):
    prompt_id: str
    ok: bool
    violations: list[ViolationModel]
    warnings: list[ViolationModel]


class PromptAck(BaseModel):
    prompt_id: str
    revision: int
    warnings: list[ViolationModel]


class RunsResponse(BaseModel):
    runs: list[dict]


class ElementPatched(BaseModel):
    element_id: str
    text: str
    revision: int
