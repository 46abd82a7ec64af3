/** Wire types shared with the engine's session API. */

export type GestureKind =
  | 'press'
  | 'drag_block'
  | 'pinch'
  | 'smudge'
  | 'stretch'
  | 'squash'
  | 'rip'
  | 'water_line'
  | 'plant_press'
  | 'pluck_leaf'
  | 'drop_leaf'
  | 'preserve_hold'
  | 'edit_leaf'
  | 'voice_utterance';

/** [x, y, t_ms] sample as the engine expects. */
export type WirePoint = [number, number, number];

export interface WireGestureEvent {
  kind: GestureKind;
  points: WirePoint[];
  target?: string | null;
  payload?: string | null;
}

export interface DiffSpan {
  start: number;
  end: number;
  kind: 'inserted' | 'replaced';
}

export interface EditDiff {
  spans: DiffSpan[];
}

export interface BlockView {
  id: string;
  text: string;
  x: number;
  y: number;
  w: number;
  h: number;
  origin: string;
  busy: boolean;
}

export interface LeafView {
  id: string;
  fern_id: string;
  gist: string;
  full: string;
  status: string;
  born_at: number;
}

export interface FernView {
  id: string;
  seed_text: string;
  dimension: string;
  x: number;
  y: number;
  leaves: LeafView[];
  checkpoints: [string, string][];
}

export interface SessionView {
  session_id: string;
  writing_context: string | null;
  clock_ms: number;
  sequence: number;
  hash: string;
  blocks: BlockView[];
  ferns: FernView[];
}

export interface PointerSample {
  pointerId: number;
  x: number;
  y: number;
  t: number;
  pointerType: 'touch' | 'pen' | 'mouse';
  pressure: number;
}

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export function rectContains(r: Rect, x: number, y: number): boolean {
  return x >= r.x && x <= r.x + r.w && y >= r.y && y <= r.y + r.h;
}
