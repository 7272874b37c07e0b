/** Shared fakes: a scripted server, a media element stand-in, and a speech
 * synth that records what it was asked to say.
 */

import {
  DEFAULT_SETTINGS,
  type Cue,
  type CustomizationSettings,
  type FetchLike,
  type JobStateName,
  type JobStatus,
  type TrackDoc,
} from '../src/api.js';
import type { SpeechPort, SynthLike, UtteranceLike } from '../src/speech.js';

export function jsonResponse(status: number, body?: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => {
      if (body === undefined) throw new Error('no body');
      return body;
    },
  } as unknown as Response;
}

export function makeCue(startS: number, text: string, wordCount?: number): Cue {
  return {
    start_s: startS,
    text,
    word_count: wordCount ?? text.split(/\s+/).length,
    flags: [],
  };
}

export function makeTrack(
  cues: Cue[],
  settings: Partial<CustomizationSettings> = {},
  durationS = 60
): TrackDoc {
  const full = { ...DEFAULT_SETTINGS, ...settings };
  return {
    format_version: 1,
    video_id: 'vid-test',
    settings: full,
    plan: { frequency_s: full.frequency_s, duration_s: durationS, flags: [] },
    cues,
    flags: [],
  };
}

export class FakeSynth implements SynthLike {
  spoken: { text: string; rate: number; volume: number; at: number }[] = [];
  current: UtteranceLike | null = null;
  cancelled = 0;

  speak(utterance: UtteranceLike): void {
    this.current = utterance;
    this.spoken.push({
      text: utterance.text,
      rate: utterance.rate,
      volume: utterance.volume,
      at: Date.now(),
    });
  }

  cancel(): void {
    this.cancelled++;
    this.current = null;
  }

  /** Simulate the utterance finishing naturally. */
  endCurrent(): void {
    const utterance = this.current;
    this.current = null;
    utterance?.onend?.();
  }

  texts(): string[] {
    return this.spoken.map((entry) => entry.text);
  }
}

export function fakePort(synth: FakeSynth): SpeechPort {
  return {
    synth,
    makeUtterance: (text) => ({ text, rate: 1, volume: 1, onend: null, onerror: null }),
  };
}

export class FakeMedia {
  currentTime = 0;
  volume = 1;
  paused = true;
  private listeners = new Map<string, (() => void)[]>();

  addEventListener(type: string, listener: () => void): void {
    const list = this.listeners.get(type) ?? [];
    list.push(listener);
    this.listeners.set(type, list);
  }

  dispatch(type: string): void {
    for (const listener of this.listeners.get(type) ?? []) listener();
  }

  play(): void {
    this.paused = false;
    this.dispatch('play');
  }

  pause(): void {
    this.paused = true;
    this.dispatch('pause');
  }

  seekTo(positionS: number): void {
    this.currentTime = positionS;
    this.dispatch('seeked');
  }
}

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

function status(jobId: string, state: JobStateName, videoId: string | null): JobStatus {
  return { job_id: jobId, state, detail: state === 'failed' ? 'boom' : null, progress: 0.5, video_id: videoId };
}

/** Scripted description service. Per-job status queues pop one state per
 * poll and repeat the last one; tracks are served once the queue says ready.
 */
export class FakeServer {
  requests: RecordedRequest[] = [];
  tracks = new Map<string, TrackDoc>();
  submitResponse: { status: number; body: unknown } = { status: 200, body: { job_id: 'job-1' } };
  regenerateResponse: { status: number; body: unknown } = {
    status: 200,
    body: { job_id: 'job-1', cached: true },
  };
  answerFor: (body: { t_s: number; question: string; input_mode?: string }) => {
    status: number;
    body: unknown;
  } = (body) => ({
    status: 200,
    body: {
      video_id: 'vid-test',
      t_s: body.t_s,
      question: body.question,
      input_mode: body.input_mode ?? 'typed',
      answer: `Answer about ${body.question}`,
      question_type: 'unclassified',
      asked_at: '2026-08-22T00:00:00Z',
      accuracy_rating: null,
      hint: null,
      error: null,
    },
  });
  private statusQueues = new Map<string, JobStatus[]>();

  setStates(jobId: string, states: JobStateName[], videoId: string | null = 'vid-test'): void {
    this.statusQueues.set(
      jobId,
      states.map((state) => status(jobId, state, state === 'ready' ? videoId : null))
    );
  }

  requestsTo(method: string, pathPart: string): RecordedRequest[] {
    return this.requests.filter((r) => r.method === method && r.path.includes(pathPart));
  }

  readonly fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? 'GET';
    const path = url.replace(/^https?:\/\/[^/]+/, '');
    const body = typeof init?.body === 'string' ? JSON.parse(init.body) : undefined;
    this.requests.push({ method, path, body });

    if (method === 'POST' && path === '/videos') {
      return jsonResponse(this.submitResponse.status, this.submitResponse.body);
    }

    let match = path.match(/^\/videos\/([^/]+)$/);
    if (method === 'GET' && match) {
      const queue = this.statusQueues.get(match[1]);
      if (!queue || queue.length === 0) return jsonResponse(404, { detail: 'unknown job' });
      const next = queue.length > 1 ? queue.shift()! : queue[0];
      return jsonResponse(200, next);
    }

    match = path.match(/^\/videos\/([^/]+)\/track$/);
    if (method === 'GET' && match) {
      const track = this.tracks.get(match[1]);
      if (!track) return jsonResponse(409, { detail: 'job is not ready' });
      return jsonResponse(200, track);
    }

    match = path.match(/^\/videos\/([^/]+)\/regenerate$/);
    if (method === 'POST' && match) {
      return jsonResponse(this.regenerateResponse.status, this.regenerateResponse.body);
    }

    match = path.match(/^\/videos\/([^/]+)\/questions$/);
    if (method === 'POST' && match) {
      const reply = this.answerFor(body as { t_s: number; question: string });
      return jsonResponse(reply.status, reply.body);
    }

    return jsonResponse(404, { detail: `no route: ${method} ${path}` });
  };
}

export function buttonByText(root: ParentNode, text: string): HTMLButtonElement {
  const found = Array.from(root.querySelectorAll('button')).find(
    (button) => button.textContent === text
  );
  if (!found) throw new Error(`no button labeled "${text}"`);
  return found as HTMLButtonElement;
}

export function controlByLabel(root: ParentNode, labelText: string): HTMLElement {
  const label = Array.from(root.querySelectorAll('label')).find(
    (el) => el.textContent === labelText
  );
  const target = label?.htmlFor ? label.ownerDocument.getElementById(label.htmlFor) : null;
  if (!target) throw new Error(`no control labeled "${labelText}"`);
  return target;
}

export async function flushMicrotasks(turns = 12): Promise<void> {
  for (let i = 0; i < turns; i++) await Promise.resolve();
}
