/**
 * Pointer-log gesture recognition.
 *
 * The engine interprets already-classified gestures geometrically; this
 * module does the classification. A completed pointer log (all pointers
 * down to up) plus scene context (block/leaf hit testing, soil line) maps
 * to exactly one wire gesture event, or to null when the frame is
 * ambiguous — partial events are never emitted.
 */

import { PointerSample, Rect, WireGestureEvent, WirePoint, rectContains } from './types.js';

export interface Scene {
  /** y of the soil line; presses at or below it plant ferns. */
  soilY: number;
  blockAt(x: number, y: number): string | null;
  /** Tight bounds of a block's text (inset from the block rect). */
  blockTextBounds(blockId: string): Rect | null;
  leafAt(x: number, y: number): string | null;
  /** The garden air above the soil where rain lines are drawn. */
  inSky(x: number, y: number): boolean;
}

const HOLD_MS = 500;
const HOLD_MAX_DRIFT = 8;
const DIVERGE_RATIO = 1.15;
const CONVERGE_RATIO = 0.85;
const ZIGZAG_REVERSALS = 3;
const ZIGZAG_WASTE = 1.5; // path length vs net displacement

function byPointer(samples: PointerSample[]): Map<number, PointerSample[]> {
  const groups = new Map<number, PointerSample[]>();
  for (const s of samples) {
    const list = groups.get(s.pointerId) ?? [];
    if (list.length > 0 && s.t < list[list.length - 1].t) {
      throw new Error(`pointer ${s.pointerId} timestamps not monotone`);
    }
    list.push(s);
    groups.set(s.pointerId, list);
  }
  return groups;
}

function wire(samples: PointerSample[]): WirePoint[] {
  return samples.map((s) => [s.x, s.y, s.t]);
}

function dist(a: PointerSample, b: PointerSample): number {
  return Math.hypot(a.x - b.x, a.y - b.y);
}

function pathLength(track: PointerSample[]): number {
  let total = 0;
  for (let i = 1; i < track.length; i++) total += dist(track[i - 1], track[i]);
  return total;
}

function reversals(track: PointerSample[]): number {
  // direction changes along the axis that saw the most travel
  let travelX = 0;
  let travelY = 0;
  for (let i = 1; i < track.length; i++) {
    travelX += Math.abs(track[i].x - track[i - 1].x);
    travelY += Math.abs(track[i].y - track[i - 1].y);
  }
  const horizontal = travelX >= travelY;
  let count = 0;
  let lastSign = 0;
  for (let i = 1; i < track.length; i++) {
    const d = horizontal ? track[i].x - track[i - 1].x : track[i].y - track[i - 1].y;
    if (d === 0) continue;
    const sign = d > 0 ? 1 : -1;
    if (lastSign !== 0 && sign !== lastSign) count++;
    lastSign = sign;
  }
  return count;
}

function classifySingle(track: PointerSample[], scene: Scene): WireGestureEvent | null {
  const first = track[0];
  const last = track[track.length - 1];
  const drift = Math.max(...track.map((s) => dist(first, s)));
  const duration = last.t - first.t;
  const onLeaf = scene.leafAt(first.x, first.y);
  const onBlock = scene.blockAt(first.x, first.y);

  if (drift <= HOLD_MAX_DRIFT) {
    if (duration < HOLD_MS) return null; // tap: ambiguous, wait for more
    if (onBlock) return { kind: 'press', points: wire(track), target: onBlock };
    if (onLeaf) return { kind: 'preserve_hold', points: wire(track), target: onLeaf };
    if (first.y >= scene.soilY) return { kind: 'plant_press', points: wire(track) };
    return null;
  }

  if (onLeaf) {
    return { kind: 'drop_leaf', points: wire(track), target: onLeaf };
  }
  if (onBlock) {
    const wasted = pathLength(track) >= ZIGZAG_WASTE * dist(first, last);
    if (reversals(track) >= ZIGZAG_REVERSALS && wasted) {
      return { kind: 'smudge', points: wire(track), target: onBlock };
    }
    return { kind: 'drag_block', points: wire(track), target: onBlock };
  }
  if (scene.inSky(first.x, first.y) && scene.inSky(last.x, last.y)) {
    return { kind: 'water_line', points: wire(track) };
  }
  return null;
}

function midTearPath(a: PointerSample[], b: PointerSample[]): WirePoint[] {
  const n = Math.min(a.length, b.length);
  const out: WirePoint[] = [];
  for (let i = 0; i < n; i++) {
    out.push([(a[i].x + b[i].x) / 2, (a[i].y + b[i].y) / 2, Math.max(a[i].t, b[i].t)]);
  }
  return out;
}

function classifyPair(a: PointerSample[], b: PointerSample[], scene: Scene): WireGestureEvent | null {
  const [a0, a1] = [a[0], a[a.length - 1]];
  const [b0, b1] = [b[0], b[b.length - 1]];
  const blockA = scene.blockAt(a0.x, a0.y);
  const blockB = scene.blockAt(b0.x, b0.y);
  if (!blockA || blockA !== blockB) return null;

  const span0 = dist(a0, b0);
  const span1 = dist(a1, b1);
  if (span0 === 0) return null;
  const ratio = span1 / span0;
  const spanPoints: WirePoint[] = [
    [a0.x, a0.y, a0.t],
    [b0.x, b0.y, b0.t],
    [a1.x, a1.y, Math.max(a1.t, b1.t)],
    [b1.x, b1.y, Math.max(a1.t, b1.t)],
  ];

  if (ratio >= DIVERGE_RATIO) {
    // separation growing along y tears the block apart; along x it stretches
    const growX = Math.abs(a1.x - b1.x) - Math.abs(a0.x - b0.x);
    const growY = Math.abs(a1.y - b1.y) - Math.abs(a0.y - b0.y);
    if (growY > growX) {
      return { kind: 'rip', points: midTearPath(a, b), target: blockA };
    }
    return { kind: 'stretch', points: spanPoints, target: blockA };
  }

  if (ratio <= CONVERGE_RATIO) {
    const text = scene.blockTextBounds(blockA);
    const bothInText =
      text !== null && rectContains(text, a0.x, a0.y) && rectContains(text, b0.x, b0.y);
    if (bothInText) {
      return { kind: 'pinch', points: spanPoints, target: blockA };
    }
    return { kind: 'squash', points: spanPoints, target: blockA };
  }

  return null; // barely moved: ambiguous
}

/**
 * Classify one completed pointer log. Returns null for ambiguous frames.
 */
export function classifyLog(samples: PointerSample[], scene: Scene): WireGestureEvent | null {
  if (samples.length === 0) return null;
  const groups = [...byPointer(samples).values()];
  if (groups.some((g) => g.length === 0)) return null;
  if (groups.length === 1) return classifySingle(groups[0], scene);
  if (groups.length === 2) return classifyPair(groups[0], groups[1], scene);
  return null;
}

/**
 * Streaming wrapper: feed samples as they arrive, classify on gesture end.
 */
export class GestureRecognizer {
  private samples: PointerSample[] = [];
  private down = new Set<number>();

  constructor(
    private scene: Scene,
    private emit: (event: WireGestureEvent) => void,
    private onPluck?: (leafId: string) => void,
  ) {}

  pointerDown(s: PointerSample): void {
    this.down.add(s.pointerId);
    this.samples.push(s);
    const leaf = this.scene.leafAt(s.x, s.y);
    if (leaf && this.onPluck) this.onPluck(leaf);
  }

  pointerMove(s: PointerSample): void {
    if (this.down.has(s.pointerId)) this.samples.push(s);
  }

  pointerUp(s: PointerSample): void {
    if (!this.down.has(s.pointerId)) return;
    this.samples.push(s);
    this.down.delete(s.pointerId);
    if (this.down.size === 0) {
      const log = this.samples;
      this.samples = [];
      const event = classifyLog(log, this.scene);
      if (event) this.emit(event);
    }
  }

  cancel(): void {
    this.samples = [];
    this.down.clear();
  }
}
