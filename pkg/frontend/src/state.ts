/**
 * Studio state: the latest server snapshot plus UI-only bits (mode,
 * selection, pick-mode). Rendered views subscribe and re-render on change;
 * the canvas always shows exactly what the server has at `revision`.
 */

import { ApiClient, type DocumentSnapshot, type FeedEvent, type RunData } from './api.js';

export type StudioMode = 'edit' | 'interact';

export type PickHandler = (elementId: string) => void;

export class StudioStore {
  api: ApiClient | null = null;
  docId: string | null = null;
  snapshot: DocumentSnapshot | null = null;
  mode: StudioMode = 'edit';
  selectedPrompt: string | null = null;
  highlighted: string | null = null;
  lastRuns: RunData[] = [];
  statusLine = 'no document loaded';
  pick: PickHandler | null = null;

  private listeners = new Set<() => void>();
  private feedAbort: AbortController | null = null;

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  notify(): void {
    for (const listener of this.listeners) listener();
  }

  setStatus(line: string): void {
    this.statusLine = line;
    this.notify();
  }

  /** Enter pick mode: the next canvas element click lands in `handler`. */
  startPicking(handler: PickHandler, hint: string): void {
    this.pick = handler;
    this.setStatus(hint);
  }

  resolvePick(elementId: string): boolean {
    if (!this.pick) return false;
    const handler = this.pick;
    this.pick = null;
    handler(elementId);
    this.notify();
    return true;
  }

  async load(baseUrl: string, docId: string): Promise<void> {
    this.feedAbort?.abort();
    this.api = new ApiClient(baseUrl);
    this.docId = docId;
    await this.refetch();
    this.setStatus(`loaded ${docId}`);
    this.feedAbort = new AbortController();
    void this.api
      .subscribeEvents(docId, (event) => this.onFeedEvent(event), this.feedAbort.signal)
      .catch(() => this.setStatus('event feed disconnected'));
  }

  async refetch(): Promise<void> {
    if (!this.api || !this.docId) return;
    const snapshot = await this.api.getDocument(this.docId);
    // never go backwards: a stale response must not overwrite a newer one
    if (!this.snapshot || snapshot.revision >= this.snapshot.revision) {
      this.snapshot = snapshot;
    }
    this.notify();
  }

  private onFeedEvent(event: FeedEvent): void {
    if (event.event === 'run_finished' && event.run) {
      this.lastRuns = [...this.lastRuns.slice(-9), event.run as RunData];
    }
    const known = this.snapshot?.revision ?? -1;
    if (event.revision > known || event.event === 'resync') {
      void this.refetch();
    } else {
      this.notify();
    }
  }

  element(elementId: string) {
    return this.snapshot?.document.text_elements.find((el) => el.id === elementId) ?? null;
  }

  elementText(elementId: string): string {
    return this.element(elementId)?.text ?? `⟨${elementId}?⟩`;
  }
}
