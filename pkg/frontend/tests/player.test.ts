import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { audit } from '../src/a11y.js';
import { ApiClient, DEFAULT_SETTINGS, type Cue } from '../src/api.js';
import { KEYBOARD_MAP } from '../src/help.js';
import { createPlayer, type Player } from '../src/player.js';
import type { SpeechPort } from '../src/speech.js';
import {
  buttonByText,
  controlByLabel,
  FakeMedia,
  FakeServer,
  FakeSynth,
  fakePort,
  flushMicrotasks,
  makeCue,
  makeTrack,
} from './helpers.js';

// one minute of video, cue starts deliberately off the 250 ms tick grid
const FIXTURE_CUES: Cue[] = [
  makeCue(0.0, 'A title card fades in over a dark street.'),
  makeCue(6.4, 'Rain starts; two figures share one umbrella.'),
  makeCue(13.37, 'The taller figure points toward a lit doorway.'),
  makeCue(22.9, 'Inside, shelves of clocks line every wall.'),
  makeCue(31.05, 'A shopkeeper winds a brass pocket watch.'),
  makeCue(44.2, 'Both visitors lean in to watch the mechanism.'),
  makeCue(55.75, 'The watch snaps shut; the lights dim again.'),
];

interface Setup {
  server: FakeServer;
  media: FakeMedia;
  synth: FakeSynth;
  player: Player;
  root: HTMLElement;
}

let active: Player | null = null;

function setup(options: { speechPort?: SpeechPort | null } = {}): Setup {
  const server = new FakeServer();
  server.setStates('job-1', ['ready']);
  server.tracks.set('job-1', makeTrack(FIXTURE_CUES));

  const root = document.createElement('div');
  document.body.appendChild(root);
  const media = new FakeMedia();
  const synth = new FakeSynth();
  const player = createPlayer(root, {
    client: new ApiClient('http://svc', server.fetch),
    media,
    speechPort: options.speechPort !== undefined ? options.speechPort : fakePort(synth),
    recognitionCtor: null,
    sessionId: 'sess-test',
  });
  active = player;
  return { server, media, synth, player, root };
}

async function loaded(options: { speechPort?: SpeechPort | null } = {}): Promise<Setup> {
  const s = setup(options);
  await s.player.load('clip.mp4', DEFAULT_SETTINGS);
  return s;
}

/** Advance playback and the wall clock together, one tick at a time. */
async function playUntil(media: FakeMedia, targetS: number): Promise<void> {
  while (media.currentTime < targetS) {
    media.currentTime = Math.min(targetS, media.currentTime + 0.25);
    await vi.advanceTimersByTimeAsync(250);
  }
}

function press(key: string): void {
  document.dispatchEvent(new KeyboardEvent('keydown', { key, bubbles: true }));
}

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  active?.dispose();
  active = null;
  document.body.innerHTML = '';
  vi.useRealTimers();
});

describe('loading', () => {
  it('submits through the setup screen and polls the job to completion', async () => {
    const { server, player, root } = setup();
    server.setStates('job-1', ['queued', 'generating', 'ready']);

    const source = root.querySelector('#video-source') as HTMLInputElement;
    source.value = 'clip.mp4';
    buttonByText(root, 'Load with these settings').click();
    await vi.advanceTimersByTimeAsync(2500);
    await flushMicrotasks();

    expect(player.jobId).toBe('job-1');
    expect(player.track?.cues).toHaveLength(7);

    const submits = server.requestsTo('POST', '/videos');
    expect(submits).toHaveLength(1);
    expect(submits[0].body).toEqual({
      source: { path: 'clip.mp4' },
      settings: DEFAULT_SETTINGS,
      session_id: 'sess-test',
    });
    expect(server.requestsTo('GET', '/videos/job-1')).toHaveLength(4); // 3 polls + track
    expect(root.textContent).toContain('Descriptions ready: 7 cues');
  });

  it('submits http sources as a url', async () => {
    const { server, player } = setup();
    await player.load('https://cdn.example/v.mp4', DEFAULT_SETTINGS);
    const submits = server.requestsTo('POST', '/videos');
    expect((submits[0].body as { source: unknown }).source).toEqual({
      url: 'https://cdn.example/v.mp4',
    });
  });

  it('shows a submit rejection inline', async () => {
    const { server, player, root } = setup();
    server.submitResponse = { status: 400, body: { detail: 'unsupported container' } };
    await player.load('clip.zzz', DEFAULT_SETTINGS);

    const alert = root.querySelector('[role="alert"]') as HTMLElement;
    expect(alert.hidden).toBe(false);
    expect(alert.textContent).toBe('unsupported container');
    expect(player.jobId).toBeNull();
  });

  it('reports a failed generation job in the status line', async () => {
    const { server, player, root } = setup();
    server.setStates('job-1', ['queued', 'failed']);
    const pending = player.load('clip.mp4', DEFAULT_SETTINGS);
    await vi.advanceTimersByTimeAsync(1500);
    await pending;

    expect(root.textContent).toContain('Generation failed: boom');
    expect(player.track).toBeNull();
    expect(buttonByText(root, 'Regenerate descriptions').disabled).toBe(true);
  });
});

describe('accessibility of the screens', () => {
  it('finds zero critical violations on setup, playback, and question screens', async () => {
    const { player } = await loaded();
    player.vqaPanel.show();
    player.helpScreen.hidden = false;

    expect(audit(player.setupScreen)).toEqual([]);
    expect(audit(player.playerScreen)).toEqual([]);
    expect(audit(player.vqaPanel.element)).toEqual([]);
    expect(audit(player.helpScreen)).toEqual([]);
  });

  it('the audit is not vacuous: a planted nameless control is caught', async () => {
    const { player } = await loaded();
    const bad = document.createElement('button');
    player.playerScreen.appendChild(bad);
    expect(audit(player.playerScreen).map((v) => v.rule)).toContain('missing-name');
    bad.remove();
    expect(audit(player.playerScreen)).toEqual([]);
  });
});

describe('keyboard shortcuts', () => {
  it('q opens the question panel, focuses it, and Escape restores focus', async () => {
    const { player, root } = await loaded();
    const anchor = buttonByText(root, 'Play current description');
    anchor.focus();

    press('q');
    expect(player.vqaPanel.open).toBe(true);
    expect((document.activeElement as HTMLElement).id).toBe('vqa-question');

    press('Escape');
    expect(player.vqaPanel.open).toBe(false);
    expect(document.activeElement).toBe(anchor);

    press('q');
    expect(player.vqaPanel.open).toBe(true);
  });

  it('stays inert while focus is in a text field', async () => {
    const { player, synth, root } = await loaded();
    const source = root.querySelector('#video-source') as HTMLInputElement;
    source.focus();
    source.dispatchEvent(new KeyboardEvent('keydown', { key: 'q', bubbles: true }));
    source.dispatchEvent(new KeyboardEvent('keydown', { key: 'd', bubbles: true }));

    expect(player.vqaPanel.open).toBe(false);
    expect(synth.spoken).toEqual([]);
  });

  it('d speaks the current cue again and s stops speech', async () => {
    const { media, synth, player } = await loaded();
    media.play();
    await playUntil(media, 1);
    expect(synth.texts()).toEqual([FIXTURE_CUES[0].text]);
    expect(player.speaker.speaking).toBe(true);

    press('s');
    expect(player.speaker.speaking).toBe(false);
    expect(synth.cancelled).toBeGreaterThanOrEqual(1);

    press('d');
    expect(synth.texts()).toEqual([FIXTURE_CUES[0].text, FIXTURE_CUES[0].text]);
  });

  it('bracket keys change the rate and rescale the cue duration estimate', async () => {
    const { player, root } = await loaded();
    const indicator = root.querySelector('.cue-duration') as HTMLElement;
    expect(indicator.textContent).toContain('3.6'); // 9 words / 2.5 wps

    press(']');
    press(']');
    press(']');
    press(']');
    expect(player.speaker.rate).toBe(2.0);
    expect((root.querySelector('#tts-rate') as HTMLInputElement).value).toBe('2');
    expect(indicator.textContent).toContain('1.8'); // doubled rate, half the time

    press('[');
    expect(player.speaker.rate).toBe(1.75);
  });

  it('h toggles a help screen documenting every shortcut', async () => {
    const { player } = await loaded();
    expect(player.helpScreen.hidden).toBe(true);
    press('h');
    expect(player.helpScreen.hidden).toBe(false);
    for (const shortcut of KEYBOARD_MAP) {
      expect(player.helpScreen.textContent).toContain(shortcut.keys);
      expect(player.helpScreen.textContent).toContain(shortcut.action);
    }
    press('h');
    expect(player.helpScreen.hidden).toBe(true);
  });
});

describe('synchronized description playback', () => {
  it('speaks every cue of a one-minute track within 250 ms of its start', async () => {
    const { media, synth } = await loaded();
    media.play();
    const t0 = Date.now();

    for (let ms = 250; ms <= 60500; ms += 250) {
      media.currentTime = ms / 1000;
      await vi.advanceTimersByTimeAsync(250);
    }

    expect(synth.texts()).toEqual(FIXTURE_CUES.map((cue) => cue.text));
    synth.spoken.forEach((entry, i) => {
      const lag = entry.at - t0 - FIXTURE_CUES[i].start_s * 1000;
      expect(lag, `cue ${i} lag`).toBeGreaterThanOrEqual(0);
      expect(lag, `cue ${i} lag`).toBeLessThanOrEqual(250);
    });
  });

  it('ducks the video while narrating and restores it after', async () => {
    const { media, synth } = await loaded();
    media.volume = 1.0;
    media.play();
    await playUntil(media, 1);

    expect(media.volume).toBeCloseTo(0.3, 10); // -70% under narration
    synth.endCurrent();
    expect(media.volume).toBeCloseTo(1.0, 10);
  });

  it('keeps firing order equal to track order across seeks', async () => {
    const { media, synth } = await loaded();
    media.play();
    await playUntil(media, 15);
    expect(synth.texts()).toEqual(FIXTURE_CUES.slice(0, 3).map((c) => c.text));

    media.seekTo(5.0); // rewind: later cues replay in order
    await playUntil(media, 15);
    media.seekTo(40.0); // jump ahead: skipped cues stay silent
    await playUntil(media, 46);

    const expected = [
      ...FIXTURE_CUES.slice(0, 3),
      FIXTURE_CUES[1],
      FIXTURE_CUES[2],
      FIXTURE_CUES[5],
    ].map((c) => c.text);
    expect(synth.texts()).toEqual(expected);
  });

  it('renders cue text readably when speech synthesis is unavailable', async () => {
    const { media, root } = await loaded({ speechPort: null });
    media.play();
    await playUntil(media, 1);

    const live = root.querySelector('.announcements') as HTMLElement;
    expect(live.textContent).toBe(FIXTURE_CUES[0].text);
    expect((root.querySelector('.cue-text') as HTMLElement).textContent).toBe(
      FIXTURE_CUES[0].text
    );
  });
});

describe('regeneration', () => {
  it('round-trips color exclusion and frequency changes mid-session', async () => {
    const { server, media, synth, player, root } = await loaded();
    media.seekTo(20.0);

    const newCues = [
      makeCue(0.0, 'A title card fades in.'),
      makeCue(8.0, 'Two figures walk without an umbrella.'),
      makeCue(16.0, 'Shelves of clocks, described without color.'),
      makeCue(24.0, 'After the change the shopkeeper winds a watch.'),
    ];
    server.regenerateResponse = { status: 200, body: { job_id: 'job-2' } };
    server.setStates('job-2', ['generating', 'ready']);
    server.tracks.set('job-2', makeTrack(newCues, { colors: 'exclude', frequency_s: 8 }));

    (controlByLabel(root, 'Color mentions') as HTMLSelectElement).value = 'exclude';
    (controlByLabel(root, 'Seconds between descriptions') as HTMLSelectElement).value = '8';
    buttonByText(root, 'Regenerate descriptions').click();
    await vi.advanceTimersByTimeAsync(1500);
    await flushMicrotasks();

    const regens = server.requestsTo('POST', '/regenerate');
    expect(regens).toHaveLength(1);
    expect(regens[0].path).toBe('/videos/job-1/regenerate');
    const sent = (regens[0].body as { settings: Record<string, unknown> }).settings;
    expect(sent.colors).toBe('exclude');
    expect(sent.frequency_s).toBe(8);

    expect(player.jobId).toBe('job-2');
    expect(player.track?.settings.colors).toBe('exclude');
    expect(player.track?.settings.frequency_s).toBe(8);
    expect(media.currentTime).toBeCloseTo(20.0, 9); // position survives

    // the scheduler now follows the new track from the preserved position
    media.play();
    await playUntil(media, 25);
    expect(synth.texts()).toEqual(['After the change the shopkeeper winds a watch.']);

    // follow-up questions target the regenerated job
    player.vqaPanel.show();
    (root.querySelector('#vqa-question') as HTMLInputElement).value = 'what changed';
    await player.vqaPanel.submit();
    expect(server.requestsTo('POST', '/videos/job-2/questions')).toHaveLength(1);
  });

  it('keeps the same job when the service reports the settings unchanged', async () => {
    const { server, player, root } = await loaded();
    server.regenerateResponse = { status: 200, body: { job_id: 'job-1', cached: true } };
    buttonByText(root, 'Regenerate descriptions').click();
    await flushMicrotasks();

    expect(server.requestsTo('POST', '/regenerate')).toHaveLength(1);
    expect(player.jobId).toBe('job-1');
    expect(player.track?.cues).toHaveLength(7);
  });

  it('shows a rejection inline and keeps the working track', async () => {
    const { server, player, root } = await loaded();
    server.regenerateResponse = { status: 400, body: { detail: 'settings rejected' } };
    buttonByText(root, 'Regenerate descriptions').click();
    await flushMicrotasks();

    const alert = root.querySelector('[role="alert"]') as HTMLElement;
    expect(alert.hidden).toBe(false);
    expect(alert.textContent).toBe('settings rejected');
    expect(player.jobId).toBe('job-1');
    expect(player.track?.cues).toHaveLength(7);
  });
});
