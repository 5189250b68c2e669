/**
 * Prompt editor panel: template segments (literal text interleaved with
 * element-bound slots shown as live pink chips), attribute-based output
 * routing (blue chips, click to highlight the element on canvas), sampling
 * controls, trigger assignment, and run/dry-run actions. Server validation
 * violations render inline.
 */

import { ApiError, type DiagnosticData, type ViolationData } from './api.js';
import {
  addAttribute,
  appendSlot,
  draftFromPrompt,
  newDraft,
  removeAttribute,
  removeSegment,
  setLiteral,
  toPromptData,
  type PromptDraft,
} from './editor_model.js';
import type { StudioStore } from './state.js';

export class PromptEditor {
  draft: PromptDraft | null = null;
  private violations: ViolationData[] = [];
  private diagnostics: DiagnosticData[] = [];
  private preview = '';
  private renderedFor: string | null = null;

  constructor(
    private root: HTMLElement,
    private store: StudioStore,
  ) {
    store.subscribe(() => this.onStoreChange());
    this.render();
  }

  private onStoreChange(): void {
    if (this.store.mode === 'interact') {
      this.root.hidden = true;
      return;
    }
    this.root.hidden = false;
    const selected = this.store.selectedPrompt;
    if (selected !== this.renderedFor) {
      const prompt = selected
        ? this.store.snapshot?.prompts.find((p) => p.prompt_id === selected)
        : null;
      this.draft = prompt ? draftFromPrompt(prompt) : selected ? newDraft(selected) : null;
      this.violations = [];
      this.diagnostics = [];
      this.preview = '';
      this.render();
    } else {
      this.refreshLive();
    }
  }

  /** Update the live pieces without rebuilding inputs mid-typing. */
  private refreshLive(): void {
    for (const chip of this.root.querySelectorAll<HTMLElement>('[data-live-element]')) {
      chip.textContent = this.store.elementText(chip.dataset.liveElement ?? '');
    }
    const list = this.root.querySelector('[data-role=prompt-list]');
    if (list) this.renderPromptList(list as HTMLElement);
  }

  render(): void {
    this.renderedFor = this.store.selectedPrompt;
    this.root.textContent = '';

    const list = document.createElement('div');
    list.dataset.role = 'prompt-list';
    this.root.appendChild(list);
    this.renderPromptList(list);

    if (!this.draft) return;
    const draft = this.draft;

    const form = document.createElement('div');
    form.className = 'editor-form';
    this.root.appendChild(form);

    const title = document.createElement('h3');
    title.textContent = draft.isNew ? `New prompt ${draft.prompt_id}` : draft.prompt_id;
    form.appendChild(title);

    const nameInput = document.createElement('input');
    nameInput.dataset.role = 'prompt-name';
    nameInput.value = draft.name;
    nameInput.addEventListener('input', () => (draft.name = nameInput.value));
    form.appendChild(labeled('Name', nameInput));

    // -- template segments --
    const segmentBox = document.createElement('div');
    segmentBox.className = 'segments';
    form.appendChild(segmentBox);
    draft.segments.forEach((segment, i) => {
      if (segment.kind === 'literal') {
        const area = document.createElement('textarea');
        area.dataset.role = 'segment-literal';
        area.dataset.segmentIndex = String(i);
        area.value = segment.text;
        area.addEventListener('input', () => setLiteral(draft, i, area.value));
        segmentBox.appendChild(area);
      } else {
        const chip = document.createElement('span');
        chip.className = 'chip pink';
        chip.dataset.role = 'input-chip';
        chip.dataset.elementId = segment.element;
        chip.dataset.liveElement = segment.element;
        chip.title = `input from ${segment.element} (click to highlight)`;
        chip.textContent = this.store.elementText(segment.element);
        chip.addEventListener('click', () => this.highlight(segment.element));
        const remove = document.createElement('button');
        remove.className = 'chip-remove';
        remove.textContent = 'x';
        remove.addEventListener('click', () => {
          removeSegment(draft, i);
          this.render();
        });
        const wrap = document.createElement('span');
        wrap.className = 'chip-wrap';
        wrap.append(chip, remove);
        segmentBox.appendChild(wrap);
      }
    });

    const insertInput = document.createElement('button');
    insertInput.dataset.role = 'insert-input';
    insertInput.className = 'pink-button';
    insertInput.textContent = 'Insert Input';
    insertInput.addEventListener('click', () =>
      this.store.startPicking((elementId) => {
        appendSlot(draft, elementId);
        this.render();
      }, 'pick a canvas element to wire as input'),
    );
    const addText = document.createElement('button');
    addText.dataset.role = 'add-text';
    addText.textContent = 'Add text';
    addText.addEventListener('click', () => {
      draft.segments.push({ kind: 'literal', text: '' });
      this.render();
    });
    form.appendChild(row(insertInput, addText));

    // -- output routing --
    const outputBox = document.createElement('div');
    outputBox.className = 'output-box';
    form.appendChild(outputBox);
    const single = modeButton('Single', draft.mode === 'single');
    const multiple = modeButton('Multiple', draft.mode === 'multiple');
    single.dataset.role = 'mode-single';
    multiple.dataset.role = 'mode-multiple';
    single.addEventListener('click', () => {
      draft.mode = 'single';
      this.render();
    });
    multiple.addEventListener('click', () => {
      draft.mode = 'multiple';
      this.render();
    });
    outputBox.appendChild(row(single, multiple));

    if (draft.mode === 'single') {
      const pick = document.createElement('button');
      pick.dataset.role = 'pick-single-target';
      pick.textContent = draft.single_target ? 'Rebind output' : 'Bind output';
      pick.addEventListener('click', () =>
        this.store.startPicking((elementId) => {
          draft.single_target = elementId;
          this.render();
        }, 'pick the element that receives the whole completion'),
      );
      const chipOrNothing = draft.single_target
        ? this.outputChip(draft.single_target)
        : document.createTextNode('(no target yet)');
      outputBox.appendChild(row(pick, chipOrNothing));
    } else {
      draft.attributes.forEach((attribute, i) => {
        const label = document.createElement('input');
        label.dataset.role = 'attribute-label';
        label.dataset.attributeIndex = String(i);
        label.placeholder = 'Attribute, e.g. Artist:';
        label.value = attribute.label;
        label.addEventListener('input', () => (attribute.label = label.value));
        const bind = document.createElement('button');
        bind.dataset.role = 'bind-attribute';
        bind.dataset.attributeIndex = String(i);
        bind.textContent = attribute.target ? 'Rebind' : 'Bind';
        bind.addEventListener('click', () =>
          this.store.startPicking((elementId) => {
            attribute.target = elementId;
            this.render();
          }, `pick the element for ${attribute.label || 'this attribute'}`),
        );
        const remove = document.createElement('button');
        remove.textContent = 'Remove';
        remove.addEventListener('click', () => {
          removeAttribute(draft, i);
          this.render();
        });
        const chip = attribute.target
          ? this.outputChip(attribute.target)
          : document.createTextNode('(unbound)');
        outputBox.appendChild(row(label, chip, bind, remove));
      });
      const add = document.createElement('button');
      add.dataset.role = 'add-attribute';
      add.textContent = 'Add attribute';
      add.addEventListener('click', () => {
        addAttribute(draft);
        this.render();
      });
      outputBox.appendChild(row(add));
    }

    // -- sampling params --
    const temperature = numberInput('temperature', draft.temperature, 0.1, (v) => (draft.temperature = v));
    const maxTokens = numberInput('max-tokens', draft.max_tokens, 1, (v) => (draft.max_tokens = Math.round(v)));
    const stopWord = document.createElement('input');
    stopWord.dataset.role = 'stop-word';
    stopWord.value = draft.stop_word;
    stopWord.addEventListener('input', () => (draft.stop_word = stopWord.value));
    form.appendChild(
      row(labeled('Temperature', temperature), labeled('Stop word', stopWord), labeled('Max tokens', maxTokens)),
    );

    // -- trigger assignment --
    const triggerSelect = document.createElement('select');
    triggerSelect.dataset.role = 'assign-trigger';
    const none = document.createElement('option');
    none.value = '';
    none.textContent = '(no trigger)';
    triggerSelect.appendChild(none);
    for (const trigger of this.store.snapshot?.document.triggers ?? []) {
      const option = document.createElement('option');
      option.value = trigger.id;
      option.textContent = `${trigger.label} (${trigger.id})`;
      triggerSelect.appendChild(option);
    }
    triggerSelect.value = draft.trigger ?? '';
    triggerSelect.addEventListener('change', () => {
      draft.trigger = triggerSelect.value === '' ? null : triggerSelect.value;
    });
    const autoRun = document.createElement('input');
    autoRun.type = 'checkbox';
    autoRun.dataset.role = 'auto-run';
    autoRun.checked = draft.auto_run;
    autoRun.addEventListener('change', () => (draft.auto_run = autoRun.checked));
    form.appendChild(row(labeled('Assign to trigger', triggerSelect), labeled('Auto-run', autoRun)));

    // -- actions --
    const save = actionButton('save-prompt', 'Save', () => void this.save());
    const run = actionButton('run-prompt', 'Run Prompt', () => void this.run());
    const dry = actionButton('dry-run', 'Preview prompt', () => void this.dryRun());
    const del = actionButton('delete-prompt', 'Delete', () => void this.remove());
    form.appendChild(row(save, run, dry, del));

    const problems = document.createElement('ul');
    problems.dataset.role = 'violations';
    for (const violation of this.violations) {
      const item = document.createElement('li');
      item.textContent = `${violation.rule}: ${violation.detail}`;
      problems.appendChild(item);
    }
    form.appendChild(problems);

    if (this.preview) {
      const pre = document.createElement('pre');
      pre.dataset.role = 'prompt-preview';
      pre.textContent = this.preview;
      form.appendChild(pre);
    }

    const diagnostics = document.createElement('ul');
    diagnostics.dataset.role = 'diagnostics';
    for (const diagnostic of this.diagnostics) {
      const item = document.createElement('li');
      item.textContent = `${diagnostic.kind} (${diagnostic.subject}) ${diagnostic.detail}`;
      diagnostics.appendChild(item);
    }
    form.appendChild(diagnostics);
  }

  private renderPromptList(container: HTMLElement): void {
    container.textContent = '';
    const heading = document.createElement('h2');
    heading.textContent = 'Prompts';
    container.appendChild(heading);
    for (const prompt of this.store.snapshot?.prompts ?? []) {
      const button = document.createElement('button');
      button.dataset.role = 'prompt-item';
      button.dataset.promptId = prompt.prompt_id;
      button.textContent =
        prompt.prompt_id === this.store.selectedPrompt ? `* ${prompt.name}` : prompt.name;
      button.addEventListener('click', () => {
        this.store.selectedPrompt = prompt.prompt_id;
        this.store.notify();
      });
      container.appendChild(button);
    }
    const fresh = document.createElement('button');
    fresh.dataset.role = 'new-prompt';
    fresh.textContent = 'New prompt';
    fresh.addEventListener('click', () => {
      const existing = new Set(
        (this.store.snapshot?.prompts ?? []).map((p) => p.prompt_id),
      );
      let i = 1;
      while (existing.has(`prompt-${i}`)) i += 1;
      this.store.selectedPrompt = `prompt-${i}`;
      this.store.notify();
    });
    container.appendChild(fresh);
  }

  private outputChip(elementId: string): HTMLElement {
    const chip = document.createElement('span');
    chip.className = 'chip blue';
    chip.dataset.role = 'output-chip';
    chip.dataset.elementId = elementId;
    chip.dataset.liveElement = elementId;
    chip.title = `output to ${elementId} (click to highlight)`;
    chip.textContent = this.store.elementText(elementId);
    chip.addEventListener('click', () => this.highlight(elementId));
    return chip;
  }

  private highlight(elementId: string): void {
    this.store.highlighted = elementId;
    this.store.notify();
  }

  private async save(): Promise<void> {
    if (!this.draft || !this.store.api || !this.store.docId) return;
    const data = toPromptData(this.draft);
    try {
      if (this.draft.isNew) {
        await this.store.api.createPrompt(this.store.docId, data);
        this.draft.isNew = false;
      } else {
        await this.store.api.updatePrompt(this.store.docId, data);
      }
      this.violations = [];
      await this.store.refetch(); // don't wait on the feed round-trip
      this.store.setStatus(`saved ${data.prompt_id}`);
      this.render();
    } catch (err) {
      if (err instanceof ApiError) {
        this.violations = err.violations();
        this.store.setStatus(`save rejected (${err.status})`);
        this.render();
        return;
      }
      throw err;
    }
  }

  private async run(): Promise<void> {
    if (!this.draft || !this.store.api || !this.store.docId) return;
    this.store.setStatus(`running ${this.draft.prompt_id}...`);
    try {
      const { runs } = await this.store.api.runPrompt(this.store.docId, this.draft.prompt_id);
      this.diagnostics = runs.flatMap((r) => r.diagnostics);
      this.store.lastRuns = runs;
      this.store.setStatus(`run ${runs[0]?.status ?? 'done'}`);
      this.render();
    } catch (err) {
      this.store.setStatus(`run failed: ${err}`);
    }
  }

  private async dryRun(): Promise<void> {
    if (!this.draft || !this.store.api || !this.store.docId) return;
    try {
      const rendered = await this.store.api.dryRun(this.store.docId, this.draft.prompt_id);
      this.preview = rendered.text;
      this.render();
    } catch (err) {
      this.store.setStatus(`preview failed: ${err}`);
    }
  }

  private async remove(): Promise<void> {
    if (!this.draft || !this.store.api || !this.store.docId) return;
    try {
      await this.store.api.deletePrompt(this.store.docId, this.draft.prompt_id);
    } catch {
      // deleting a never-saved draft is fine
    }
    this.store.selectedPrompt = null;
    await this.store.refetch();
  }
}

function labeled(text: string, control: HTMLElement): HTMLElement {
  const wrap = document.createElement('label');
  wrap.className = 'labeled';
  const span = document.createElement('span');
  span.textContent = text;
  wrap.append(span, control);
  return wrap;
}

function row(...children: (HTMLElement | Text)[]): HTMLElement {
  const div = document.createElement('div');
  div.className = 'row';
  div.append(...children);
  return div;
}

function modeButton(label: string, active: boolean): HTMLButtonElement {
  const button = document.createElement('button');
  button.textContent = label;
  button.className = active ? 'mode active' : 'mode';
  return button;
}

function actionButton(role: string, label: string, onClick: () => void): HTMLButtonElement {
  const button = document.createElement('button');
  button.dataset.role = role;
  button.textContent = label;
  button.addEventListener('click', onClick);
  return button;
}

function numberInput(
  role: string,
  value: number,
  step: number,
  onChange: (value: number) => void,
): HTMLInputElement {
  const input = document.createElement('input');
  input.type = 'number';
  input.dataset.role = role;
  input.step = String(step);
  input.value = String(value);
  input.addEventListener('input', () => {
    const parsed = Number(input.value);
    if (!Number.isNaN(parsed)) onChange(parsed);
  });
  return input;
}
