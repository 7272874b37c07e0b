/** Paused-frame question panel: ask by keyboard or voice, hear the answer.
 *
 * One request in flight at a time. The timestamp sent is the playback
 * position at the moment of asking. Failed asks keep the question text and
 * offer a retry that re-sends the same question at the same timestamp.
 */

import { ApiError, type Exchange } from './api.js';
import type { DescriptionSpeaker } from './speech.js';

export interface RecognitionLike {
  lang: string;
  onresult: ((event: { results: ArrayLike<ArrayLike<{ transcript: string }>> }) => void) | null;
  onerror: ((event: { error: string }) => void) | null;
  start(): void;
  stop(): void;
}

export function platformRecognition(): (new () => RecognitionLike) | null {
  if (typeof window === 'undefined') return null;
  const w = window as unknown as {
    SpeechRecognition?: new () => RecognitionLike;
    webkitSpeechRecognition?: new () => RecognitionLike;
  };
  return w.SpeechRecognition ?? w.webkitSpeechRecognition ?? null;
}

export interface VQAPanelOptions {
  ask: (question: string, tS: number, inputMode: 'typed' | 'spoken') => Promise<Exchange>;
  getPositionS: () => number;
  speaker: DescriptionSpeaker;
  recognitionCtor?: (new () => RecognitionLike) | null;
  onPendingChange?: (pending: boolean) => void;
}

export interface VQAPanel {
  element: HTMLElement;
  readonly open: boolean;
  readonly pending: boolean;
  show(): void;
  hide(): void;
  toggle(): void;
  submit(): Promise<void>;
}

export function buildVQAPanel(container: HTMLElement, options: VQAPanelOptions): VQAPanel {
  const recognitionCtor =
    options.recognitionCtor !== undefined ? options.recognitionCtor : platformRecognition();
  const onPendingChange = options.onPendingChange ?? (() => {});

  const section = document.createElement('section');
  section.setAttribute('aria-label', 'Ask about the video');
  section.hidden = true;

  const heading = document.createElement('h2');
  heading.textContent = 'Ask about the video';
  section.appendChild(heading);

  const label = document.createElement('label');
  label.htmlFor = 'vqa-question';
  label.textContent = 'Your question';
  section.appendChild(label);

  const input = document.createElement('input');
  input.type = 'text';
  input.id = 'vqa-question';
  section.appendChild(input);

  const askButton = document.createElement('button');
  askButton.type = 'button';
  askButton.textContent = 'Ask';
  section.appendChild(askButton);

  let micButton: HTMLButtonElement | null = null;
  if (recognitionCtor !== null) {
    micButton = document.createElement('button');
    micButton.type = 'button';
    micButton.textContent = 'Speak your question';
    section.appendChild(micButton);
  }

  const status = document.createElement('p');
  status.setAttribute('role', 'status');
  status.setAttribute('aria-live', 'polite');
  section.appendChild(status);

  const retryButton = document.createElement('button');
  retryButton.type = 'button';
  retryButton.textContent = 'Retry question';
  retryButton.hidden = true;
  section.appendChild(retryButton);

  const historyHeading = document.createElement('h3');
  historyHeading.textContent = 'Questions asked';
  section.appendChild(historyHeading);

  const history = document.createElement('ul');
  history.setAttribute('aria-label', 'Questions asked');
  section.appendChild(history);

  container.appendChild(section);

  let pending = false;
  let previousFocus: HTMLElement | null = null;
  let lastFailed: { question: string; tS: number; mode: 'typed' | 'spoken' } | null = null;

  function setPending(value: boolean): void {
    pending = value;
    askButton.disabled = value;
    if (micButton) micButton.disabled = value;
    onPendingChange(value);
  }

  function appendHistory(exchange: Exchange): void {
    const item = document.createElement('li');
    const q = document.createElement('p');
    q.textContent = `Q (${exchange.t_s.toFixed(1)}s): ${exchange.question}`;
    const a = document.createElement('p');
    a.textContent = exchange.answer;
    item.appendChild(q);
    item.appendChild(a);
    history.appendChild(item);
  }

  async function send(question: string, tS: number, mode: 'typed' | 'spoken'): Promise<void> {
    if (pending || !question.trim()) return;
    setPending(true);
    retryButton.hidden = true;
    status.textContent = 'Asking…';
    try {
      const exchange = await options.ask(question, tS, mode);
      status.textContent = exchange.answer;
      appendHistory(exchange);
      options.speaker.speak(exchange.answer);
      lastFailed = null;
      input.value = '';
    } catch (error) {
      lastFailed = { question, tS, mode };
      retryButton.hidden = false;
      if (error instanceof ApiError && error.status === 504) {
        status.textContent = 'The answer took too long. You can retry.';
      } else if (error instanceof ApiError) {
        status.textContent = `Could not answer: ${error.detail}`;
      } else {
        status.textContent = 'Could not reach the service. You can retry.';
      }
    } finally {
      setPending(false);
    }
  }

  askButton.addEventListener('click', () => {
    void send(input.value, options.getPositionS(), 'typed');
  });
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') {
      event.preventDefault();
      void send(input.value, options.getPositionS(), 'typed');
    }
  });
  retryButton.addEventListener('click', () => {
    if (lastFailed !== null) void send(lastFailed.question, lastFailed.tS, lastFailed.mode);
  });

  if (micButton && recognitionCtor) {
    micButton.addEventListener('click', () => {
      const recognition = new recognitionCtor();
      recognition.lang = 'en-US';
      recognition.onresult = (event) => {
        const transcript = event.results[0]?.[0]?.transcript ?? '';
        input.value = transcript;
        void send(transcript, options.getPositionS(), 'spoken');
      };
      recognition.onerror = () => {
        status.textContent = 'Voice input failed; you can type instead.';
      };
      recognition.start();
    });
  }

  const panel: VQAPanel = {
    element: section,
    get open() {
      return !section.hidden;
    },
    get pending() {
      return pending;
    },
    show() {
      if (!section.hidden) return;
      previousFocus = document.activeElement instanceof HTMLElement ? document.activeElement : null;
      section.hidden = false;
      input.focus();
    },
    hide() {
      if (section.hidden) return;
      section.hidden = true;
      previousFocus?.focus();
      previousFocus = null;
    },
    toggle() {
      if (section.hidden) panel.show();
      else panel.hide();
    },
    submit() {
      return send(input.value, options.getPositionS(), 'typed');
    },
  };
  return panel;
}
