/**
 * Continuous speech capture via the Web Speech API.
 *
 * Interim transcripts are surfaced for display only; final transcripts
 * drive voice block creation and planting. Permission problems surface
 * through a callback (the app shows a banner) and never block the engine.
 */

export interface TranscriptEvent {
  transcript: string;
  final: boolean;
}

interface RecognitionLike {
  continuous: boolean;
  interimResults: boolean;
  lang: string;
  onresult: ((event: any) => void) | null;
  onerror: ((event: any) => void) | null;
  onend: (() => void) | null;
  start(): void;
  stop(): void;
}

type RecognitionCtor = new () => RecognitionLike;

function defaultCtor(): RecognitionCtor | null {
  const w = globalThis as any;
  return w.SpeechRecognition ?? w.webkitSpeechRecognition ?? null;
}

export class VoiceCapture {
  private recognition: RecognitionLike | null = null;
  private running = false;

  constructor(
    private onTranscript: (e: TranscriptEvent) => void,
    private onPermissionDenied: () => void,
    ctor: RecognitionCtor | null = defaultCtor(),
  ) {
    if (!ctor) return; // unsupported browser: voice features stay off
    this.recognition = new ctor();
    this.recognition.continuous = true;
    this.recognition.interimResults = true;
    this.recognition.lang = 'en-US';
    this.recognition.onresult = (event: any) => {
      for (let i = event.resultIndex; i < event.results.length; i++) {
        const result = event.results[i];
        this.onTranscript({
          transcript: result[0].transcript.trim(),
          final: Boolean(result.isFinal),
        });
      }
    };
    this.recognition.onerror = (event: any) => {
      if (event.error === 'not-allowed' || event.error === 'service-not-allowed') {
        this.running = false;
        this.onPermissionDenied();
      }
    };
    this.recognition.onend = () => {
      if (this.running) this.recognition?.start(); // keep continuous capture alive
    };
  }

  get supported(): boolean {
    return this.recognition !== null;
  }

  start(): void {
    if (!this.recognition || this.running) return;
    this.running = true;
    this.recognition.start();
  }

  stop(): void {
    this.running = false;
    this.recognition?.stop();
  }
}
