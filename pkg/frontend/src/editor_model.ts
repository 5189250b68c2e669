/**
 * Pure editing model behind the prompt editor panel: a draft the DOM layer
 * mutates through small operations, serializable to the prompt wire format.
 */

import type { AttributeData, PromptData, SegmentData } from './api.js';

export interface PromptDraft {
  prompt_id: string;
  name: string;
  segments: SegmentData[];
  temperature: number;
  stop_word: string;
  max_tokens: number;
  mode: 'single' | 'multiple';
  single_target: string | null;
  attributes: AttributeData[];
  trigger: string | null;
  auto_run: boolean;
  isNew: boolean;
}

export function newDraft(promptId: string): PromptDraft {
  return {
    prompt_id: promptId,
    name: promptId,
    segments: [{ kind: 'literal', text: '' }],
    temperature: 0.7,
    stop_word: '',
    max_tokens: 256,
    mode: 'multiple',
    single_target: null,
    attributes: [],
    trigger: null,
    auto_run: false,
    isNew: true,
  };
}

export function draftFromPrompt(prompt: PromptData): PromptDraft {
  return {
    prompt_id: prompt.prompt_id,
    name: prompt.name,
    segments: prompt.segments.map((s) => ({ ...s })),
    temperature: prompt.params.temperature,
    stop_word: prompt.params.stop_word ?? '',
    max_tokens: prompt.params.max_tokens,
    mode: prompt.output.mode,
    single_target: prompt.output.mode === 'single' ? prompt.output.target : null,
    attributes:
      prompt.output.mode === 'multiple'
        ? prompt.output.attributes.map((a) => ({ ...a }))
        : [],
    trigger: prompt.trigger,
    auto_run: prompt.auto_run,
    isNew: false,
  };
}

/** Append an input slot; inserts a fresh literal after it so typing can continue. */
export function appendSlot(draft: PromptDraft, elementId: string): void {
  const last = draft.segments[draft.segments.length - 1];
  const beforeLast = draft.segments[draft.segments.length - 2];
  // an untouched trailing literal goes away, except between two slots where
  // it is the separator that keeps them apart
  if (
    last &&
    last.kind === 'literal' &&
    last.text === '' &&
    beforeLast?.kind !== 'input_slot'
  ) {
    draft.segments.pop();
  }
  draft.segments.push({ kind: 'input_slot', element: elementId });
  draft.segments.push({ kind: 'literal', text: '' });
}

export function removeSegment(draft: PromptDraft, index: number): void {
  draft.segments.splice(index, 1);
  if (draft.segments.length === 0) {
    draft.segments.push({ kind: 'literal', text: '' });
  }
}

export function setLiteral(draft: PromptDraft, index: number, text: string): void {
  const segment = draft.segments[index];
  if (segment && segment.kind === 'literal') {
    segment.text = text;
  }
}

export function addAttribute(draft: PromptDraft, label = '', target = ''): void {
  draft.attributes.push({ label, target });
}

export function removeAttribute(draft: PromptDraft, index: number): void {
  draft.attributes.splice(index, 1);
}

/** Serialize to the wire format, dropping empty boundary literals. */
export function toPromptData(draft: PromptDraft): PromptData {
  const segments = draft.segments.filter((segment, i) => {
    if (segment.kind !== 'literal' || segment.text !== '') return true;
    const prev = draft.segments[i - 1];
    const next = draft.segments[i + 1];
    return prev?.kind === 'input_slot' && next?.kind === 'input_slot';
  });
  return {
    prompt_id: draft.prompt_id,
    name: draft.name,
    segments,
    params: {
      temperature: draft.temperature,
      stop_word: draft.stop_word === '' ? null : draft.stop_word,
      max_tokens: draft.max_tokens,
    },
    output:
      draft.mode === 'single'
        ? { mode: 'single', target: draft.single_target ?? '' }
        : { mode: 'multiple', attributes: draft.attributes.map((a) => ({ ...a })) },
    trigger: draft.trigger,
    auto_run: draft.auto_run,
  };
}
