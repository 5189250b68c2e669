/**
 * Studio smoke test against the real service: load the music-search
 * mockup, author the search prompt by picking canvas elements, run it on
 * the scripted backend, watch the writes land on the canvas, and check the
 * pink input chip live-updates after a canvas text edit.
 */

import { execFileSync, spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync } from 'node:fs';
import net from 'node:net';
import os from 'node:os';
import path from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { mountStudio, type Studio } from '../src/app.js';
import { ApiClient, type DocumentData, type PromptData } from '../src/api.js';

const REPO_ROOT = path.resolve(__dirname, '..', '..');

let proc: ChildProcess | null = null;
let baseUrl = '';
let fixtureDir = '';
let musicDocument: DocumentData;
let fixturePrompts: PromptData[];

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.listen(0, '127.0.0.1', () => {
      const address = server.address();
      if (address && typeof address === 'object') {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error('no port'));
      }
    });
  });
}

async function waitFor(check: () => boolean, what: string, timeoutMs = 10000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((r) => setTimeout(r, 25));
  }
  throw new Error(`timed out waiting for ${what}`);
}

async function waitForServer(url: string): Promise<void> {
  const deadline = Date.now() + 15000;
  for (;;) {
    try {
      await fetch(`${url}/documents/__probe__`);
      return; // any HTTP response (404) means the server is up
    } catch {
      if (Date.now() > deadline) throw new Error('service did not come up');
      await new Promise((r) => setTimeout(r, 100));
    }
  }
}

beforeAll(async () => {
  fixtureDir = mkdtempSync(path.join(os.tmpdir(), 'studio-smoke-'));
  execFileSync(
    'python3',
    [
      '-c',
      'import sys; sys.path.insert(0, "tests");' +
        'from pathlib import Path; from fixture_lib import write_music_fixture;' +
        `write_music_fixture(Path(${JSON.stringify(fixtureDir)}))`,
    ],
    { cwd: REPO_ROOT },
  );
  musicDocument = JSON.parse(readFileSync(path.join(fixtureDir, 'document.json'), 'utf-8'));
  fixturePrompts = JSON.parse(readFileSync(path.join(fixtureDir, 'prompts.json'), 'utf-8'));

  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  proc = spawn(
    'python3',
    [
      '-m', 'promptloom.cli', 'serve',
      '--port', String(port),
      '--backend', 'scripted',
      '--fixtures', path.join(fixtureDir, 'completions.json'),
    ],
    { cwd: REPO_ROOT, stdio: 'ignore' },
  );
  await waitForServer(baseUrl);
  await new ApiClient(baseUrl).createDocument(musicDocument);
});

afterAll(() => {
  proc?.kill('SIGTERM');
  rmSync(fixtureDir, { recursive: true, force: true });
});

function q<T extends HTMLElement>(selector: string): T {
  const el = document.querySelector<T>(selector);
  if (!el) throw new Error(`missing ${selector}`);
  return el;
}

function canvasBox(elementId: string): HTMLElement {
  return q(`[data-role=canvas] .element[data-element-id=${elementId}]`);
}

function canvasText(elementId: string): HTMLTextAreaElement {
  return canvasBox(elementId).querySelector('[data-role=element-text]') as HTMLTextAreaElement;
}

function clickHeader(elementId: string): void {
  (canvasBox(elementId).querySelector('[data-role=element-header]') as HTMLElement).click();
}

function setValue(el: HTMLInputElement | HTMLTextAreaElement, value: string, event = 'input'): void {
  el.value = value;
  el.dispatchEvent(new Event(event, { bubbles: true }));
}

describe('studio smoke', () => {
  let studio: Studio;

  it('loads the mockup, authors a prompt by picking, runs it, and live-updates chips', async () => {
    document.body.innerHTML = '<div id="app"></div>';
    studio = mountStudio(q('#app'), { baseUrl, docId: 'music-search' });

    // -- load the fixture document --
    q<HTMLButtonElement>('[data-role=load-document]').click();
    await waitFor(
      () => document.querySelectorAll('[data-role=canvas] .element').length === 7,
      'canvas elements',
    );
    expect(q('[data-role=canvas] .trigger[data-trigger-id=go]').textContent).toBe('Go');

    // -- author the search prompt: literals typed, inputs picked --
    const searchFixture = fixturePrompts.find((p) => p.prompt_id === 'search')!;
    const segments = searchFixture.segments;
    q<HTMLButtonElement>('[data-role=new-prompt]').click();
    await waitFor(() => !!document.querySelector('[data-role=segment-literal]'), 'editor form');

    setValue(q<HTMLInputElement>('[data-role=prompt-name]'), 'Music search');
    setValue(
      q<HTMLTextAreaElement>('[data-role=segment-literal][data-segment-index="0"]'),
      (segments[0] as { text: string }).text,
    );
    q<HTMLButtonElement>('[data-role=insert-input]').click();
    clickHeader('query'); // pink pick: query element becomes the first input
    await waitFor(
      () => !!document.querySelector('[data-role=input-chip][data-element-id=query]'),
      'query chip',
    );
    setValue(
      q<HTMLTextAreaElement>('[data-role=segment-literal][data-segment-index="2"]'),
      (segments[2] as { text: string }).text,
    );
    q<HTMLButtonElement>('[data-role=insert-input]').click();
    clickHeader('decade');
    await waitFor(
      () => !!document.querySelector('[data-role=input-chip][data-element-id=decade]'),
      'decade chip',
    );

    // -- bind multiple outputs via blue chips --
    q<HTMLButtonElement>('[data-role=add-attribute]').click();
    setValue(q<HTMLInputElement>('[data-role=attribute-label][data-attribute-index="0"]'), 'Artist:');
    q<HTMLButtonElement>('[data-role=bind-attribute][data-attribute-index="0"]').click();
    clickHeader('artist');
    await waitFor(
      () => !!document.querySelector('[data-role=output-chip][data-element-id=artist]'),
      'artist output chip',
    );
    q<HTMLButtonElement>('[data-role=add-attribute]').click();
    setValue(q<HTMLInputElement>('[data-role=attribute-label][data-attribute-index="1"]'), 'Description:');
    q<HTMLButtonElement>('[data-role=bind-attribute][data-attribute-index="1"]').click();
    clickHeader('desc');
    await waitFor(
      () => !!document.querySelector('[data-role=output-chip][data-element-id=desc]'),
      'desc output chip',
    );

    // -- sampling params + trigger assignment, then save --
    setValue(q<HTMLInputElement>('[data-role=temperature]'), '0');
    setValue(q<HTMLInputElement>('[data-role=max-tokens]'), '256');
    const triggerSelect = q<HTMLSelectElement>('[data-role=assign-trigger]');
    triggerSelect.value = 'go';
    triggerSelect.dispatchEvent(new Event('change', { bubbles: true }));
    q<HTMLButtonElement>('[data-role=save-prompt]').click();
    await waitFor(
      () => !!studio.store.snapshot?.prompts.some((p) => p.prompt_id === 'prompt-1'),
      'prompt saved',
    );
    expect(q('[data-role=status-line]').textContent).toBe('saved prompt-1');
    // (the authored segments must equal the fixture's so the scripted
    // backend recognizes the rendered prompt)
    const saved = studio.store.snapshot!.prompts.find((p) => p.prompt_id === 'prompt-1')!;
    expect(saved.segments).toEqual(segments);

    // -- interaction mode: type inputs, press the real Go button --
    q<HTMLButtonElement>('[data-role=toggle-mode]').click();
    await waitFor(() => q<HTMLElement>('[data-role=editor]').hidden, 'editor hidden');
    setValue(canvasText('query'), 'hip hop', 'change');
    setValue(canvasText('decade'), '1990s', 'change');
    await waitFor(
      () =>
        studio.store.elementText('query') === 'hip hop' &&
        studio.store.elementText('decade') === '1990s',
      'patches applied',
    );
    q<HTMLButtonElement>('[data-trigger-id=go]').click();
    await waitFor(
      () => canvasText('artist').value === 'A Tribe Called Quest',
      'artist element populated from the completion',
    );
    expect(canvasText('desc').value).toContain('fused jazz samples');

    // -- back to edit mode: the pink chip shows the live input text --
    q<HTMLButtonElement>('[data-role=toggle-mode]').click();
    q<HTMLButtonElement>('[data-role=prompt-item][data-prompt-id=prompt-1]').click();
    await waitFor(
      () =>
        document.querySelector('[data-role=input-chip][data-element-id=query]')?.textContent ===
        'hip hop',
      'chip shows current text',
    );

    // -- canvas text edit updates the chip without reloading --
    setValue(canvasText('query'), 'jazz fusion', 'change');
    await waitFor(
      () =>
        document.querySelector('[data-role=input-chip][data-element-id=query]')?.textContent ===
        'jazz fusion',
      'pink chip live update',
    );
  });

  it('renders validation violations inline on a bad save', async () => {
    await waitFor(
      () => !!studio.store.snapshot?.prompts.some((p) => p.prompt_id === 'prompt-1'),
      'prompt-1 known to the store',
    );
    q<HTMLButtonElement>('[data-role=new-prompt]').click();
    await waitFor(
      () => !!document.querySelector('[data-role=segment-literal]'),
      'fresh editor form',
    );
    setValue(q<HTMLTextAreaElement>('[data-role=segment-literal]'), 'no outputs at all');
    q<HTMLButtonElement>('[data-role=save-prompt]').click();
    await waitFor(
      () => (document.querySelectorAll('[data-role=violations] li').length ?? 0) > 0,
      'violations rendered',
    );
    expect(q('[data-role=violations]').textContent).toContain('MappingRuleE');
  });
});
