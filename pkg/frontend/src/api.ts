/**
 * REST + event-stream client for the promptloom service.
 *
 * The studio is a pure client: all splitting, validation and capacity
 * accounting happens server-side; this module only moves JSON around.
 * Server-sent events are read over fetch + ReadableStream so the same code
 * runs in browsers and in node-based tests (no EventSource dependency).
 */

export interface TextElementData {
  id: string;
  name: string;
  text: string;
  x: number;
  y: number;
  width: number;
  height: number;
  font_size: number;
  role_hint: 'input' | 'output' | 'static';
}

export interface TriggerData {
  id: string;
  label: string;
}

export interface DocumentData {
  doc_id: string;
  title: string;
  text_elements: TextElementData[];
  triggers: TriggerData[];
}

export type SegmentData =
  | { kind: 'literal'; text: string }
  | { kind: 'input_slot'; element: string };

export interface AttributeData {
  label: string;
  target: string;
}

export type OutputData =
  | { mode: 'single'; target: string }
  | { mode: 'multiple'; attributes: AttributeData[] };

export interface PromptData {
  prompt_id: string;
  name: string;
  segments: SegmentData[];
  params: { temperature: number; stop_word: string | null; max_tokens: number };
  output: OutputData;
  trigger: string | null;
  auto_run: boolean;
}

export interface ViolationData {
  rule: string;
  subject: string;
  detail: string;
}

export interface DiagnosticData {
  kind: string;
  subject: string;
  detail: string;
}

export interface RunData {
  run_id: string;
  prompt_id: string;
  status: 'ok' | 'backend_error' | 'validation_error';
  raw_completion: string;
  writes: { element: string; old_text: string; new_text: string }[];
  diagnostics: DiagnosticData[];
  cascade_runs: string[];
  error: string;
}

export interface DocumentSnapshot {
  document: DocumentData;
  revision: number;
  prompts: PromptData[];
}

export interface FeedEvent {
  event: string;
  revision: number;
  [key: string]: unknown;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: unknown,
  ) {
    super(`HTTP ${status}`);
  }

  /** Mapping violations from a 422 response, if any. */
  violations(): ViolationData[] {
    const detail = (this.body as { detail?: { violations?: ViolationData[] } })?.detail;
    return detail?.violations ?? [];
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { 'content-type': 'application/json' },
    ...init,
  });
  const text = await response.text();
  const body = text ? JSON.parse(text) : null;
  if (!response.ok) {
    throw new ApiError(response.status, body);
  }
  return body as T;
}

export class ApiClient {
  constructor(public baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, '')}${path}`;
  }

  getDocument(docId: string): Promise<DocumentSnapshot> {
    return request(this.url(`/documents/${docId}`));
  }

  createDocument(doc: DocumentData): Promise<{ doc_id: string }> {
    return request(this.url('/documents'), { method: 'POST', body: JSON.stringify(doc) });
  }

  patchElement(docId: string, elementId: string, text: string): Promise<{ revision: number }> {
    return request(this.url(`/documents/${docId}/elements/${elementId}`), {
      method: 'PATCH',
      body: JSON.stringify({ text }),
    });
  }

  createPrompt(docId: string, prompt: PromptData): Promise<{ prompt_id: string }> {
    return request(this.url(`/documents/${docId}/prompts`), {
      method: 'POST',
      body: JSON.stringify(prompt),
    });
  }

  updatePrompt(docId: string, prompt: PromptData): Promise<{ prompt_id: string }> {
    return request(this.url(`/documents/${docId}/prompts/${prompt.prompt_id}`), {
      method: 'PUT',
      body: JSON.stringify(prompt),
    });
  }

  deletePrompt(docId: string, promptId: string): Promise<null> {
    return request(this.url(`/documents/${docId}/prompts/${promptId}`), { method: 'DELETE' });
  }

  validation(docId: string, promptId: string): Promise<{ ok: boolean; violations: ViolationData[] }> {
    return request(this.url(`/documents/${docId}/prompts/${promptId}/validation`));
  }

  dryRun(docId: string, promptId: string): Promise<{ text: string }> {
    return request(this.url(`/documents/${docId}/prompts/${promptId}/dry_run`));
  }

  runPrompt(docId: string, promptId: string): Promise<{ runs: RunData[] }> {
    return request(this.url(`/documents/${docId}/prompts/${promptId}/run`), { method: 'POST' });
  }

  fireTrigger(docId: string, triggerId: string): Promise<{ runs: RunData[] }> {
    return request(this.url(`/documents/${docId}/triggers/${triggerId}/fire`), { method: 'POST' });
  }

  getReport(docId: string): Promise<Record<string, unknown>> {
    return request(this.url(`/documents/${docId}/report`));
  }

  /**
   * Subscribe to the change feed. Resolves when the stream closes; abort via
   * the signal. Events arrive in order, each carrying the document revision.
   */
  async subscribeEvents(
    docId: string,
    onEvent: (event: FeedEvent) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await fetch(this.url(`/documents/${docId}/events`), { signal });
    if (!response.ok || !response.body) {
      throw new ApiError(response.status, null);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    const parser = new SseParser(onEvent);
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        parser.push(decoder.decode(value, { stream: true }));
      }
    } finally {
      reader.releaseLock();
    }
  }
}

/** Incremental server-sent-events parser ("event:"/"data:" lines, blank-line framed). */
export class SseParser {
  private buffer = '';
  private dataLines: string[] = [];

  constructor(private onEvent: (event: FeedEvent) => void) {}

  push(chunk: string): void {
    this.buffer += chunk;
    for (;;) {
      const newline = this.buffer.indexOf('\n');
      if (newline === -1) return;
      const line = this.buffer.slice(0, newline).replace(/\r$/, '');
      this.buffer = this.buffer.slice(newline + 1);
      this.handleLine(line);
    }
  }

  private handleLine(line: string): void {
    if (line === '') {
      if (this.dataLines.length > 0) {
        const payload = this.dataLines.join('\n');
        this.dataLines = [];
        try {
          this.onEvent(JSON.parse(payload) as FeedEvent);
        } catch {
          // Non-JSON data frames (keep-alives) are ignored.
        }
      }
      return;
    }
    if (line.startsWith('data:')) {
      this.dataLines.push(line.slice(5).trimStart());
    }
    // "event:" lines are redundant with the JSON payload's event field.
  }
}
