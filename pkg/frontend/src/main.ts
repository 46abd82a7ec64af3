import { TexterialClient } from './api.js';
import { StudioApp } from './app.js';

async function boot(): Promise<void> {
  const stage = document.getElementById('stage');
  const banner = document.getElementById('banner');
  if (!stage || !banner) throw new Error('missing #stage or #banner');

  const client = new TexterialClient('');
  const app = new StudioApp(client, stage, banner);
  const existing = location.hash.slice(1) || undefined;
  const sessionId = await app.start(existing);
  location.hash = sessionId;

  document.getElementById('add-voice-block')?.addEventListener('click', () => {
    void app.postTranscriptAsBlock();
  });
}

void boot();
