/**
 * Studio wiring: pointer events feed the recognizer, recognized gestures
 * post to the engine, and the view re-derives entirely from GET + SSE so a
 * refresh can never lose truth.
 */

import { EngineEvent, TexterialClient } from './api.js';
import { EMPHASIS_CLASS, renderDiff } from './diffRender.js';
import { GestureRecognizer, Scene } from './recognizer.js';
import {
  EditDiff,
  FernView,
  PointerSample,
  Rect,
  SessionView,
  WireGestureEvent,
  rectContains,
} from './types.js';
import { VoiceCapture } from './voice.js';

const SOIL_Y = 400;
const SKY_TOP = 140;
const LEAF_W = 96;
const LEAF_H = 20;
const TRANSCRIPT_FRESH_MS = 10_000;

export function leafAnchor(fern: FernView, index: number): { x: number; y: number } {
  // deterministic frond placement: pair index climbs, sides alternate
  const checkpoint = Math.floor(index / 2);
  const side = index % 2 === 0 ? -1 : 1;
  return {
    x: fern.x + side * (30 + 8 * checkpoint),
    y: fern.y - 46 - 26 * checkpoint,
  };
}

export function leafRect(fern: FernView, index: number): Rect {
  const anchor = leafAnchor(fern, index);
  return { x: anchor.x - LEAF_W / 2, y: anchor.y - LEAF_H / 2, w: LEAF_W, h: LEAF_H };
}

class ViewScene implements Scene {
  soilY = SOIL_Y;
  constructor(private view: SessionView | null) {}

  blockAt(x: number, y: number): string | null {
    const view = this.view;
    if (!view) return null;
    for (let i = view.blocks.length - 1; i >= 0; i--) {
      const b = view.blocks[i];
      if (rectContains({ x: b.x, y: b.y, w: b.w, h: b.h }, x, y)) return b.id;
    }
    return null;
  }

  blockTextBounds(blockId: string): Rect | null {
    const b = this.view?.blocks.find((blk) => blk.id === blockId);
    if (!b) return null;
    return { x: b.x + 10, y: b.y + 2, w: Math.max(1, b.w - 20), h: Math.max(1, b.h - 4) };
  }

  leafAt(x: number, y: number): string | null {
    const view = this.view;
    if (!view) return null;
    for (const fern of view.ferns) {
      for (let i = 0; i < fern.leaves.length; i++) {
        const leaf = fern.leaves[i];
        if (leaf.status === 'pruned' || leaf.status === 'composted') continue;
        if (rectContains(leafRect(fern, i), x, y)) return leaf.id;
      }
    }
    return null;
  }

  inSky(x: number, y: number): boolean {
    return y >= SKY_TOP && y < this.soilY && this.blockAt(x, y) === null;
  }
}

export class StudioApp {
  private view: SessionView | null = null;
  private recognizer: GestureRecognizer;
  private unsubscribe: (() => void) | null = null;
  private lastFinalTranscript: { text: string; at: number } | null = null;
  private voice: VoiceCapture;

  constructor(
    private client: TexterialClient,
    private stage: HTMLElement,
    private banner: HTMLElement,
  ) {
    this.recognizer = new GestureRecognizer(
      this.liveScene(),
      (event) => void this.dispatch(event),
      (leafId) => void this.post({ kind: 'pluck_leaf', points: [], target: leafId }),
    );
    this.voice = new VoiceCapture(
      (e) => {
        if (e.final && e.transcript) {
          this.lastFinalTranscript = { text: e.transcript, at: Date.now() };
          this.showBanner(`heard: "${e.transcript}" — tap the canvas or long-press the soil`);
        }
      },
      () => this.showBanner('microphone permission denied; voice input is off'),
    );
  }

  private liveScene(): Scene {
    const app = this;
    return {
      get soilY() {
        return SOIL_Y;
      },
      blockAt: (x, y) => new ViewScene(app.view).blockAt(x, y),
      blockTextBounds: (id) => new ViewScene(app.view).blockTextBounds(id),
      leafAt: (x, y) => new ViewScene(app.view).leafAt(x, y),
      inSky: (x, y) => new ViewScene(app.view).inSky(x, y),
    };
  }

  async start(sessionId?: string): Promise<string> {
    this.view = sessionId
      ? await this.client.getSession(sessionId)
      : await this.client.createSession();
    const id = this.view.session_id;
    this.unsubscribe = this.client.events(id, (e) => void this.onEngineEvent(e));
    this.bindPointerEvents();
    this.render();
    this.voice.start();
    return id;
  }

  stop(): void {
    this.unsubscribe?.();
    this.voice.stop();
  }

  private bindPointerEvents(): void {
    const toSample = (ev: PointerEvent): PointerSample => {
      const rect = this.stage.getBoundingClientRect();
      return {
        pointerId: ev.pointerId,
        x: ev.clientX - rect.left,
        y: ev.clientY - rect.top,
        t: ev.timeStamp,
        pointerType: (ev.pointerType || 'mouse') as PointerSample['pointerType'],
        pressure: ev.pressure,
      };
    };
    this.stage.addEventListener('pointerdown', (ev) => this.recognizer.pointerDown(toSample(ev)));
    this.stage.addEventListener('pointermove', (ev) => this.recognizer.pointerMove(toSample(ev)));
    this.stage.addEventListener('pointerup', (ev) => this.recognizer.pointerUp(toSample(ev)));
    this.stage.addEventListener('pointercancel', () => this.recognizer.cancel());
  }

  private async dispatch(event: WireGestureEvent): Promise<void> {
    if (event.kind === 'plant_press') {
      const fresh =
        this.lastFinalTranscript && Date.now() - this.lastFinalTranscript.at < TRANSCRIPT_FRESH_MS;
      if (!fresh) {
        this.showBanner('speak an idea first, then long-press the soil to plant it');
        return;
      }
      event = { ...event, payload: this.lastFinalTranscript!.text };
      this.lastFinalTranscript = null;
    }
    await this.post(event);
  }

  async postTranscriptAsBlock(x = 60, y = 60): Promise<void> {
    if (!this.lastFinalTranscript) return;
    await this.post({
      kind: 'voice_utterance',
      points: [[x, y, Date.now()]],
      payload: this.lastFinalTranscript.text,
    });
    this.lastFinalTranscript = null;
  }

  private async post(event: WireGestureEvent): Promise<void> {
    if (!this.view) return;
    try {
      await this.client.postGesture(this.view.session_id, event);
      await this.refresh();
    } catch (err) {
      this.showBanner(`${event.kind} rejected: ${(err as Error).message}`);
    }
  }

  private async onEngineEvent(e: EngineEvent): Promise<void> {
    await this.refresh();
    if (e.type === 'op_completed' && e.data.block_id && e.data.diff) {
      const el = this.stage.querySelector<HTMLElement>(`[data-block-id="${e.data.block_id}"] .block-text`);
      const block = this.view?.blocks.find((b) => b.id === e.data.block_id);
      if (el && block) {
        renderDiff(el, block.text, e.data.diff as EditDiff);
      }
    }
    if (e.type === 'op_failed') {
      this.showBanner(`operation failed: ${e.data.error}`);
    }
  }

  private async refresh(): Promise<void> {
    if (!this.view) return;
    this.view = await this.client.getSession(this.view.session_id);
    this.render();
  }

  private showBanner(message: string): void {
    this.banner.textContent = message;
    this.banner.classList.add('visible');
    setTimeout(() => this.banner.classList.remove('visible'), 4000);
  }

  render(): void {
    if (!this.view) return;
    const doc = this.stage.ownerDocument;
    this.stage.textContent = '';

    for (const block of this.view.blocks) {
      const el = doc.createElement('div');
      el.className = 'clay-block' + (block.busy ? ' busy' : '');
      el.dataset.blockId = block.id;
      el.style.left = `${block.x}px`;
      el.style.top = `${block.y}px`;
      el.style.width = `${block.w}px`;
      el.style.minHeight = `${block.h}px`;
      const text = doc.createElement('div');
      text.className = 'block-text';
      text.textContent = block.text;
      el.appendChild(text);
      this.stage.appendChild(el);
    }

    this.stage.appendChild(this.renderGarden(doc));
  }

  private renderGarden(doc: Document): SVGSVGElement {
    const svg = doc.createElementNS('http://www.w3.org/2000/svg', 'svg');
    svg.classList.add('garden');
    svg.setAttribute('width', '100%');
    svg.setAttribute('height', '100%');

    const soil = doc.createElementNS('http://www.w3.org/2000/svg', 'line');
    soil.setAttribute('x1', '0');
    soil.setAttribute('x2', '4000');
    soil.setAttribute('y1', String(SOIL_Y));
    soil.setAttribute('y2', String(SOIL_Y));
    soil.classList.add('soil-line');
    svg.appendChild(soil);

    for (const fern of this.view?.ferns ?? []) {
      const height = 40 + 26 * fern.checkpoints.length;
      const stem = doc.createElementNS('http://www.w3.org/2000/svg', 'path');
      stem.setAttribute(
        'd',
        `M ${fern.x} ${fern.y} Q ${fern.x + 14} ${fern.y - height / 2} ${fern.x} ${fern.y - height}`,
      );
      stem.classList.add('fern-stem');
      svg.appendChild(stem);

      const fiddlehead = doc.createElementNS('http://www.w3.org/2000/svg', 'text');
      fiddlehead.setAttribute('x', String(fern.x + 6));
      fiddlehead.setAttribute('y', String(fern.y - height - 8));
      fiddlehead.classList.add('fiddlehead');
      fiddlehead.textContent = `~${fern.dimension}~`;
      svg.appendChild(fiddlehead);

      fern.leaves.forEach((leaf, index) => {
        if (leaf.status === 'pruned' || leaf.status === 'composted') return;
        const anchor = leafAnchor(fern, index);
        const label = doc.createElementNS('http://www.w3.org/2000/svg', 'text');
        label.setAttribute('x', String(anchor.x));
        label.setAttribute('y', String(anchor.y));
        label.setAttribute('text-anchor', index % 2 === 0 ? 'end' : 'start');
        label.classList.add('leaf');
        if (leaf.status === 'preserved') label.classList.add('preserved');
        label.dataset.leafId = leaf.id;
        label.textContent = leaf.gist;
        svg.appendChild(label);
      });
    }
    return svg;
  }
}

export { EMPHASIS_CLASS };
