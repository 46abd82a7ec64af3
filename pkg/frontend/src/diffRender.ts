/**
 * Inline change emphasis: the words the model touched turn bold and bounce,
 * then settle. Overlapping render calls coalesce to the latest diff.
 */

import { EditDiff } from './types.js';

export const EMPHASIS_CLASS = 'texterial-emphasis';
export const BOUNCE_CLASS = 'texterial-bounce';

const timers = new WeakMap<HTMLElement, ReturnType<typeof setTimeout>>();

interface Segment {
  text: string;
  emphasized: boolean;
}

function segment(text: string, diff: EditDiff): Segment[] {
  const spans = [...diff.spans].sort((a, b) => a.start - b.start);
  const out: Segment[] = [];
  let pos = 0;
  for (const span of spans) {
    if (span.start > pos) out.push({ text: text.slice(pos, span.start), emphasized: false });
    out.push({ text: text.slice(span.start, span.end), emphasized: true });
    pos = span.end;
  }
  if (pos < text.length) out.push({ text: text.slice(pos), emphasized: false });
  return out;
}

/**
 * Replace the element's content with the new text, wrapping each word
 * inside a diff span in an emphasis element that bounces for `durationMs`.
 */
export function renderDiff(
  el: HTMLElement,
  text: string,
  diff: EditDiff,
  durationMs = 900,
): void {
  const prior = timers.get(el);
  if (prior !== undefined) {
    clearTimeout(prior);
    timers.delete(el);
  }

  el.textContent = '';
  const doc = el.ownerDocument;
  for (const seg of segment(text, diff)) {
    if (!seg.emphasized) {
      el.appendChild(doc.createTextNode(seg.text));
      continue;
    }
    // wrap each word separately so the bounce reads per word
    const parts = seg.text.split(/(\s+)/);
    for (const part of parts) {
      if (part === '') continue;
      if (/^\s+$/.test(part)) {
        el.appendChild(doc.createTextNode(part));
      } else {
        const span = doc.createElement('span');
        span.className = `${EMPHASIS_CLASS} ${BOUNCE_CLASS}`;
        span.textContent = part;
        el.appendChild(span);
      }
    }
  }

  if (diff.spans.length > 0) {
    const timer = setTimeout(() => {
      for (const span of el.querySelectorAll(`.${BOUNCE_CLASS}`)) {
        span.classList.remove(BOUNCE_CLASS);
      }
      timers.delete(el);
    }, durationMs);
    timers.set(el, timer);
  }
}
