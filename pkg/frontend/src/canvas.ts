/**
 * Canvas: absolutely positioned text boxes and trigger buttons, mirroring
 * the mockup's geometry. Text is editable in place; edits PATCH the server
 * on change. In edit mode, clicking an element's header selects it (or
 * feeds pick mode); in interact mode the chrome disappears and triggers
 * fire prompts like a real application.
 */

import { overflows } from './capacity.js';
import type { StudioStore } from './state.js';

export function renderCanvas(container: HTMLElement, store: StudioStore): void {
  container.textContent = '';
  const snapshot = store.snapshot;
  if (!snapshot) {
    const hint = document.createElement('p');
    hint.className = 'canvas-hint';
    hint.textContent = 'Load a document to see its mockup here.';
    container.appendChild(hint);
    return;
  }
  if (snapshot.document.text_elements.length === 0 && snapshot.document.triggers.length === 0) {
    const hint = document.createElement('p');
    hint.className = 'canvas-hint';
    hint.textContent = 'This document is empty; add elements to its JSON and PUT it back.';
    container.appendChild(hint);
  }

  for (const el of snapshot.document.text_elements) {
    const box = document.createElement('div');
    box.className = 'element';
    box.dataset.elementId = el.id;
    box.style.left = `${el.x}px`;
    box.style.top = `${el.y}px`;
    box.style.width = `${el.width}px`;
    box.style.minHeight = `${el.height}px`;
    if (store.highlighted === el.id) box.classList.add('highlighted');
    if (store.pick) box.classList.add('pickable');

    if (store.mode === 'edit') {
      const header = document.createElement('div');
      header.className = 'element-header';
      header.dataset.role = 'element-header';
      header.textContent = `${el.name} · ${el.role_hint}`;
      header.addEventListener('click', () => {
        if (!store.resolvePick(el.id)) {
          store.highlighted = store.highlighted === el.id ? null : el.id;
          store.notify();
        }
      });
      box.appendChild(header);
    }

    const text = document.createElement('textarea');
    text.className = 'element-text';
    text.dataset.role = 'element-text';
    text.style.fontSize = `${el.font_size}px`;
    text.value = el.text;
    text.addEventListener('change', () => {
      if (!store.api || !store.docId) return;
      void store.api
        .patchElement(store.docId, el.id, text.value)
        .catch((err) => store.setStatus(`edit failed: ${err}`));
    });
    box.appendChild(text);

    if (overflows(el)) {
      const badge = document.createElement('span');
      badge.className = 'badge overflow';
      badge.dataset.role = 'overflow-badge';
      badge.textContent = 'overflow';
      box.appendChild(badge);
    }
    container.appendChild(box);
  }

  for (const trigger of snapshot.document.triggers) {
    const button = document.createElement('button');
    button.className = 'trigger';
    button.dataset.triggerId = trigger.id;
    button.textContent = trigger.label;
    button.addEventListener('click', () => {
      if (store.mode === 'edit' && store.resolvePick(trigger.id)) return;
      void fire(store, trigger.id);
    });
    container.appendChild(button);
  }
}

async function fire(store: StudioStore, triggerId: string): Promise<void> {
  if (!store.api || !store.docId) return;
  store.setStatus(`firing ${triggerId}...`);
  try {
    const { runs } = await store.api.fireTrigger(store.docId, triggerId);
    store.lastRuns = runs;
    store.setStatus(
      `fired ${triggerId}: ${runs.map((r) => `${r.prompt_id}=${r.status}`).join(', ')}`,
    );
  } catch (err) {
    store.setStatus(`fire failed: ${err}`);
  }
}
