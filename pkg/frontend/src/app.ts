/**
 * Studio shell: top bar (service URL, document id, mode switch), canvas and
 * prompt editor. State comes from the server; the SSE feed keeps it fresh.
 */

import { renderCanvas } from './canvas.js';
import { PromptEditor } from './prompt_editor.js';
import { StudioStore } from './state.js';

export interface Studio {
  store: StudioStore;
  editor: PromptEditor;
}

export function mountStudio(root: HTMLElement, defaults?: { baseUrl?: string; docId?: string }): Studio {
  const store = new StudioStore();
  root.textContent = '';
  root.className = 'studio';

  const topBar = document.createElement('header');
  topBar.className = 'top-bar';
  root.appendChild(topBar);

  const serviceInput = document.createElement('input');
  serviceInput.dataset.role = 'service-url';
  serviceInput.value = defaults?.baseUrl ?? guessBaseUrl();
  const docInput = document.createElement('input');
  docInput.dataset.role = 'doc-id';
  docInput.placeholder = 'document id';
  docInput.value = defaults?.docId ?? '';
  const loadButton = document.createElement('button');
  loadButton.dataset.role = 'load-document';
  loadButton.textContent = 'Load';
  loadButton.addEventListener('click', () => {
    void store
      .load(serviceInput.value, docInput.value)
      .catch((err) => store.setStatus(`load failed: ${err}`));
  });

  const modeButton = document.createElement('button');
  modeButton.dataset.role = 'toggle-mode';
  const setModeLabel = () => {
    modeButton.textContent = store.mode === 'edit' ? 'Switch to interact' : 'Switch to edit';
  };
  setModeLabel();
  modeButton.addEventListener('click', () => {
    store.mode = store.mode === 'edit' ? 'interact' : 'edit';
    setModeLabel();
    store.notify();
  });

  const status = document.createElement('span');
  status.dataset.role = 'status-line';
  topBar.append(serviceInput, docInput, loadButton, modeButton, status);

  const main = document.createElement('main');
  main.className = 'studio-main';
  root.appendChild(main);

  const canvas = document.createElement('section');
  canvas.className = 'canvas';
  canvas.dataset.role = 'canvas';
  main.appendChild(canvas);

  const editorRoot = document.createElement('aside');
  editorRoot.className = 'editor';
  editorRoot.dataset.role = 'editor';
  main.appendChild(editorRoot);

  const editor = new PromptEditor(editorRoot, store);
  store.subscribe(() => {
    renderCanvas(canvas, store);
    status.textContent = store.statusLine;
  });
  store.notify();

  return { store, editor };
}

function guessBaseUrl(): string {
  if (typeof window !== 'undefined' && window.location.protocol.startsWith('http')) {
    const params = new URLSearchParams(window.location.search);
    return params.get('service') ?? window.location.origin;
  }
  return 'http://127.0.0.1:7878';
}
