import { afterEach, describe, expect, it } from 'vitest';

import { ApiError, type Exchange } from '../src/api.js';
import { DescriptionSpeaker } from '../src/speech.js';
import { buildVQAPanel, type RecognitionLike, type VQAPanelOptions } from '../src/vqa.js';
import { buttonByText, FakeSynth, fakePort, flushMicrotasks } from './helpers.js';

function exchange(question: string, tS: number, answer: string): Exchange {
  return {
    video_id: 'vid-test',
    t_s: tS,
    question,
    input_mode: 'typed',
    answer,
    question_type: 'identify_color',
    asked_at: '2026-08-22T00:00:00Z',
    accuracy_rating: null,
    hint: null,
    error: null,
  };
}

function deferred<T>() {
  let resolve!: (value: T) => void;
  let reject!: (reason: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

interface HarnessOptions {
  ask?: VQAPanelOptions['ask'];
  position?: { s: number };
  recognitionCtor?: (new () => RecognitionLike) | null;
}

function harness(options: HarnessOptions = {}) {
  const container = document.createElement('div');
  document.body.appendChild(container);
  const synth = new FakeSynth();
  const speaker = new DescriptionSpeaker({ port: fakePort(synth) });
  const position = options.position ?? { s: 12.3 };
  const asked: { question: string; tS: number; mode: string }[] = [];
  const inner: VQAPanelOptions['ask'] =
    options.ask ?? (async (question, tS) => exchange(question, tS, 'It is blue.'));
  const panel = buildVQAPanel(container, {
    ask: (question, tS, mode) => {
      asked.push({ question, tS, mode });
      return inner(question, tS, mode);
    },
    getPositionS: () => position.s,
    speaker,
    recognitionCtor: options.recognitionCtor ?? null,
  });
  const input = container.querySelector('#vqa-question') as HTMLInputElement;
  const status = container.querySelector('[role="status"]') as HTMLElement;
  return { container, panel, input, status, synth, position, asked };
}

afterEach(() => {
  document.body.innerHTML = '';
});

describe('VQA panel', () => {
  it('starts hidden, focuses the question on open, restores focus on close', () => {
    const { container, panel, input } = harness();
    const outside = document.createElement('button');
    outside.textContent = 'elsewhere';
    document.body.appendChild(outside);
    outside.focus();

    expect(panel.open).toBe(false);
    expect(container.querySelector('section')?.hidden).toBe(true);

    panel.show();
    expect(panel.open).toBe(true);
    expect(document.activeElement).toBe(input);

    panel.hide();
    expect(panel.open).toBe(false);
    expect(document.activeElement).toBe(outside);
  });

  it('asks at the current playback position and renders the answer verbatim', async () => {
    const { container, input, status, synth, position, asked } = harness();
    position.s = 41.27;
    input.value = 'what color is the car';
    buttonByText(container, 'Ask').click();
    await flushMicrotasks();

    expect(asked).toEqual([{ question: 'what color is the car', tS: 41.27, mode: 'typed' }]);
    expect(status.textContent).toBe('It is blue.');
    expect(synth.texts()).toEqual(['It is blue.']);
    expect(input.value).toBe('');

    const item = container.querySelector('ul > li');
    expect(item?.textContent).toContain('Q (41.3s): what color is the car');
    expect(item?.textContent).toContain('It is blue.');
  });

  it('submits on Enter in the question field', async () => {
    const { input, asked } = harness();
    input.value = 'who is on screen';
    input.dispatchEvent(new KeyboardEvent('keydown', { key: 'Enter', bubbles: true }));
    await flushMicrotasks();
    expect(asked.map((a) => a.question)).toEqual(['who is on screen']);
  });

  it('allows only one question in flight', async () => {
    const gate = deferred<Exchange>();
    let calls = 0;
    const { container, panel, input } = harness({
      ask: () => {
        calls++;
        return gate.promise;
      },
    });

    input.value = 'first';
    buttonByText(container, 'Ask').click();
    await flushMicrotasks();
    expect(panel.pending).toBe(true);
    expect(buttonByText(container, 'Ask').disabled).toBe(true);

    input.value = 'second';
    void panel.submit(); // ignored while pending
    await flushMicrotasks();
    expect(calls).toBe(1);

    gate.resolve(exchange('first', 1, 'done'));
    await flushMicrotasks();
    expect(panel.pending).toBe(false);
    expect(buttonByText(container, 'Ask').disabled).toBe(false);
  });

  it('offers a retry that re-sends the same question at the same timestamp', async () => {
    let failNext = true;
    const { container, input, status, position, asked } = harness({
      ask: async (question, tS, mode) => {
        if (failNext) throw new ApiError(504, 'answer timed out');
        return exchange(question, tS, `mode=${mode}`);
      },
    });

    position.s = 10.0;
    input.value = 'what just happened';
    buttonByText(container, 'Ask').click();
    await flushMicrotasks();

    expect(status.textContent).toBe('The answer took too long. You can retry.');
    const retry = buttonByText(container, 'Retry question');
    expect(retry.hidden).toBe(false);

    failNext = false;
    position.s = 55.0; // playback moved on; the retry must not
    retry.click();
    await flushMicrotasks();

    expect(asked).toEqual([
      { question: 'what just happened', tS: 10.0, mode: 'typed' },
      { question: 'what just happened', tS: 10.0, mode: 'typed' },
    ]);
    expect(retry.hidden).toBe(true);
    expect(status.textContent).toBe('mode=typed');
  });

  it('shows service details for other errors and a generic line for network failures', async () => {
    const errors: unknown[] = [new ApiError(409, 'job is not ready'), new TypeError('fetch refused')];
    const { container, input, status } = harness({
      ask: async () => {
        throw errors.shift();
      },
    });

    input.value = 'anything';
    buttonByText(container, 'Ask').click();
    await flushMicrotasks();
    expect(status.textContent).toBe('Could not answer: job is not ready');

    buttonByText(container, 'Retry question').click();
    await flushMicrotasks();
    expect(status.textContent).toBe('Could not reach the service. You can retry.');
  });

  it('sends dictated questions with the spoken input mode', async () => {
    const instances: FakeRecognition[] = [];
    class FakeRecognition implements RecognitionLike {
      lang = '';
      onresult: RecognitionLike['onresult'] = null;
      onerror: RecognitionLike['onerror'] = null;
      started = 0;
      constructor() {
        instances.push(this);
      }
      start(): void {
        this.started++;
      }
      stop(): void {}
    }

    const { container, input, asked } = harness({ recognitionCtor: FakeRecognition });
    const mic = buttonByText(container, 'Speak your question');
    mic.click();
    expect(instances).toHaveLength(1);
    expect(instances[0].started).toBe(1);

    instances[0].onresult?.({ results: [[{ transcript: 'is anyone smiling' }]] });
    expect(input.value).toBe('is anyone smiling'); // transcript lands in the field
    await flushMicrotasks();

    expect(asked).toEqual([{ question: 'is anyone smiling', tS: 12.3, mode: 'spoken' }]);
    expect(input.value).toBe(''); // cleared on success, same as a typed ask
  });

  it('omits the microphone button when recognition is unavailable', () => {
    const { container } = harness({ recognitionCtor: null });
    const texts = Array.from(container.querySelectorAll('button')).map((b) => b.textContent);
    expect(texts).not.toContain('Speak your question');
  });
});
