import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError, type FetchLike } from '../src/api.js';
import { flushMicrotasks, jsonResponse } from './helpers.js';

interface Call {
  url: string;
  init?: RequestInit;
}

function recordingFetch(calls: Call[], response: Response): FetchLike {
  return async (url, init) => {
    calls.push({ url, init });
    return response;
  };
}

afterEach(() => {
  vi.useRealTimers();
});

describe('request building', () => {
  it('POSTs JSON bodies with a content type and trims the base URL', async () => {
    const calls: Call[] = [];
    const client = new ApiClient('http://svc:8000///', recordingFetch(calls, jsonResponse(200, { job_id: 'j1' })));
    const result = await client.submitVideo({ source: { path: 'clip.mp4' } });

    expect(result.job_id).toBe('j1');
    expect(calls[0].url).toBe('http://svc:8000/videos');
    expect(calls[0].init?.method).toBe('POST');
    expect(calls[0].init?.headers).toEqual({ 'Content-Type': 'application/json' });
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({ source: { path: 'clip.mp4' } });
  });

  it('GETs without a body and URL-encodes job ids', async () => {
    const calls: Call[] = [];
    const client = new ApiClient(
      'http://svc',
      recordingFetch(calls, jsonResponse(200, { job_id: 'a b', state: 'ready', detail: null, progress: 1, video_id: 'v' }))
    );
    await client.getStatus('a b');

    expect(calls[0].url).toBe('http://svc/videos/a%20b');
    expect(calls[0].init?.body).toBeUndefined();
  });

  it('resolves undefined for 204 responses', async () => {
    const calls: Call[] = [];
    const client = new ApiClient('http://svc', recordingFetch(calls, jsonResponse(204)));
    await expect(client.submitRatings('s1', { enjoyment: 5 })).resolves.toBeUndefined();
    expect(calls[0].url).toBe('http://svc/sessions/s1/ratings');
  });

  it('wraps the regenerate settings in a settings field', async () => {
    const calls: Call[] = [];
    const client = new ApiClient('http://svc', recordingFetch(calls, jsonResponse(200, { job_id: 'j2' })));
    await client.regenerate('j1', { colors: 'exclude' });
    expect(JSON.parse(calls[0].init?.body as string)).toEqual({ settings: { colors: 'exclude' } });
  });
});

describe('error handling', () => {
  it('surfaces the detail field of an error response', async () => {
    const client = new ApiClient('http://svc', async () => jsonResponse(400, { detail: 'unsupported container' }));
    const error = await client.submitVideo({ source: {} }).catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(400);
    expect((error as ApiError).detail).toBe('unsupported container');
  });

  it('falls back to the status text when the body is not JSON', async () => {
    const client = new ApiClient('http://svc', async () => jsonResponse(502));
    const error = await client.getTrack('j1').catch((e: unknown) => e);
    expect((error as ApiError).detail).toBe('status 502');
  });
});

describe('waitUntilReady', () => {
  it('polls once a second until the job is ready', async () => {
    vi.useFakeTimers();
    let polls = 0;
    const client = new ApiClient('http://svc', async () => {
      polls++;
      const state = polls < 3 ? 'generating' : 'ready';
      return jsonResponse(200, { job_id: 'j1', state, detail: null, progress: 0.5, video_id: null });
    });

    const pending = client.waitUntilReady('j1', 1000);
    await flushMicrotasks();
    expect(polls).toBe(1);

    await vi.advanceTimersByTimeAsync(999);
    expect(polls).toBe(1); // next poll is not due yet

    await vi.advanceTimersByTimeAsync(1);
    await flushMicrotasks();
    expect(polls).toBe(2);

    await vi.advanceTimersByTimeAsync(1000);
    const result = await pending;
    expect(polls).toBe(3);
    expect(result.state).toBe('ready');
  });

  it('stops polling on failure and reports the state', async () => {
    vi.useFakeTimers();
    let polls = 0;
    const client = new ApiClient('http://svc', async () => {
      polls++;
      return jsonResponse(200, { job_id: 'j1', state: 'failed', detail: 'decode error', progress: 0, video_id: null });
    });

    const result = await client.waitUntilReady('j1', 1000);
    expect(result.state).toBe('failed');
    expect(result.detail).toBe('decode error');
    expect(polls).toBe(1);
  });
});
