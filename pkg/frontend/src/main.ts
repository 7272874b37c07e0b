/** Browser entry point: a real video element wired into the player screens.
 * The description service address comes from a ?service= query parameter and
 * defaults to the local development server.
 */

import { ApiClient } from './api.js';
import { createPlayer, type Player } from './player.js';

const app = document.getElementById('app');
if (app) {
  const video = document.createElement('video');
  video.controls = true;
  video.setAttribute('aria-label', 'Video playback');
  app.appendChild(video);

  const service = new URLSearchParams(location.search).get('service') ?? 'http://localhost:8000';
  const player = createPlayer(app, {
    client: new ApiClient(service),
    media: video,
  });

  // a URL source is also directly playable in the element itself
  const source = app.querySelector('#video-source') as HTMLInputElement | null;
  source?.addEventListener('change', () => {
    if (/^https?:\/\//.test(source.value.trim())) video.src = source.value.trim();
  });

  (window as unknown as { player: Player }).player = player;
}
