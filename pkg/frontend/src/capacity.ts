import type { TextElementData } from './api.js';

// Same monospace approximation the service uses for its Overflow
// diagnostics; the studio computes it locally only to paint badges before
// the next run's diagnostics arrive.
export function capacityChars(el: TextElementData): number {
  const cols = Math.floor(el.width / (0.6 * el.font_size));
  const rows = Math.max(1, Math.floor(el.height / (1.3 * el.font_size)));
  return cols * rows;
}

export function overflows(el: TextElementData): boolean {
  return el.text.length > capacityChars(el);
}
