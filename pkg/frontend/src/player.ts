/** Wires the screens together: setup, playback with spoken descriptions,
 * and the question panel. Server state changes only ever go through the
 * ApiClient; everything else is local DOM and speech.
 */

import {
  ApiClient,
  ApiError,
  DEFAULT_SETTINGS,
  type Cue,
  type CustomizationSettings,
  type TrackDoc,
} from './api.js';
import { buildCustomizationPanel, type CustomizationPanel } from './customization.js';
import { buildHelpScreen } from './help.js';
import { CueScheduler } from './scheduler.js';
import { DescriptionSpeaker, type SpeechPort } from './speech.js';
import { clampRate, currentCueIndex, estimatedCueSeconds } from './state.js';
import { buildVQAPanel, type RecognitionLike, type VQAPanel } from './vqa.js';

export interface MediaLike {
  currentTime: number;
  volume: number;
  paused: boolean;
  addEventListener(type: string, listener: () => void): void;
}

export interface PlayerOptions {
  client: ApiClient;
  media: MediaLike;
  speechPort?: SpeechPort | null;
  recognitionCtor?: (new () => RecognitionLike) | null;
  pollMs?: number;
  sessionId?: string;
}

export interface Player {
  root: HTMLElement;
  setupScreen: HTMLElement;
  playerScreen: HTMLElement;
  vqaPanel: VQAPanel;
  helpScreen: HTMLElement;
  customization: CustomizationPanel;
  speaker: DescriptionSpeaker;
  readonly jobId: string | null;
  readonly track: TrackDoc | null;
  load(source: string, settings: CustomizationSettings): Promise<void>;
  regenerate(settings: CustomizationSettings): Promise<void>;
  speakCurrentCue(): void;
  handleKey(event: KeyboardEvent): void;
  /** Detach the document key listener and stop timers and speech. */
  dispose(): void;
}

function isTypingTarget(target: EventTarget | null): boolean {
  if (!(target instanceof Element)) return false;
  const tag = target.tagName.toLowerCase();
  return tag === 'input' || tag === 'textarea' || tag === 'select';
}

export function createPlayer(root: HTMLElement, options: PlayerOptions): Player {
  const client = options.client;
  const media = options.media;
  const pollMs = options.pollMs ?? 1000;
  const sessionId =
    options.sessionId ?? `web-${Date.now().toString(16)}-${Math.floor(Math.random() * 0xffff)}`;

  let jobId: string | null = null;
  let track: TrackDoc | null = null;
  let cues: Cue[] = [];

  // --- announcements and spoken-text fallback ---
  const live = document.createElement('p');
  live.setAttribute('aria-live', 'polite');
  live.className = 'announcements';
  root.appendChild(live);

  const speaker = new DescriptionSpeaker({
    port: options.speechPort,
    duckTarget: media,
    onUnavailable: (text) => {
      live.textContent = text;
    },
  });

  // --- setup screen ---
  const setupScreen = document.createElement('section');
  setupScreen.setAttribute('aria-label', 'Load a video');

  const sourceLabel = document.createElement('label');
  sourceLabel.htmlFor = 'video-source';
  sourceLabel.textContent = 'Video file or URL';
  setupScreen.appendChild(sourceLabel);

  const sourceInput = document.createElement('input');
  sourceInput.type = 'text';
  sourceInput.id = 'video-source';
  setupScreen.appendChild(sourceInput);

  const jobStatus = document.createElement('p');
  jobStatus.setAttribute('role', 'status');
  jobStatus.setAttribute('aria-live', 'polite');
  setupScreen.appendChild(jobStatus);

  const customization = buildCustomizationPanel(setupScreen, {
    initial: DEFAULT_SETTINGS,
    applyLabel: 'Load with these settings',
    onApply: (settings) => {
      void player.load(sourceInput.value.trim(), settings);
    },
  });

  const regenerateButton = document.createElement('button');
  regenerateButton.type = 'button';
  regenerateButton.textContent = 'Regenerate descriptions';
  regenerateButton.disabled = true;
  regenerateButton.addEventListener('click', () => {
    void player.regenerate(customization.readDraft());
  });
  setupScreen.appendChild(regenerateButton);
  root.appendChild(setupScreen);

  // --- player screen ---
  const playerScreen = document.createElement('section');
  playerScreen.setAttribute('aria-label', 'Playback');

  const cueText = document.createElement('p');
  cueText.className = 'cue-text';
  playerScreen.appendChild(cueText);

  const playCueButton = document.createElement('button');
  playCueButton.type = 'button';
  playCueButton.textContent = 'Play current description';
  playCueButton.addEventListener('click', () => player.speakCurrentCue());
  playerScreen.appendChild(playCueButton);

  const stopButton = document.createElement('button');
  stopButton.type = 'button';
  stopButton.textContent = 'Stop speech';
  stopButton.addEventListener('click', () => speaker.stop());
  playerScreen.appendChild(stopButton);

  const rateLabel = document.createElement('label');
  rateLabel.htmlFor = 'tts-rate';
  rateLabel.textContent = 'Speech rate';
  playerScreen.appendChild(rateLabel);

  const rateSlider = document.createElement('input');
  rateSlider.type = 'range';
  rateSlider.id = 'tts-rate';
  rateSlider.min = '0.5';
  rateSlider.max = '2';
  rateSlider.step = '0.25';
  rateSlider.value = '1';
  playerScreen.appendChild(rateSlider);

  const volumeLabel = document.createElement('label');
  volumeLabel.htmlFor = 'tts-volume';
  volumeLabel.textContent = 'Speech volume';
  playerScreen.appendChild(volumeLabel);

  const volumeSlider = document.createElement('input');
  volumeSlider.type = 'range';
  volumeSlider.id = 'tts-volume';
  volumeSlider.min = '0';
  volumeSlider.max = '1';
  volumeSlider.step = '0.05';
  volumeSlider.value = '1';
  playerScreen.appendChild(volumeSlider);

  const durationIndicator = document.createElement('p');
  durationIndicator.className = 'cue-duration';
  playerScreen.appendChild(durationIndicator);
  root.appendChild(playerScreen);

  function updateDurationIndicator(): void {
    const index = currentCueIndex(cues, media.currentTime);
    if (index < 0) {
      durationIndicator.textContent = '';
      return;
    }
    const seconds = estimatedCueSeconds(cues[index], speaker.rate);
    durationIndicator.textContent = `Current description: about ${seconds.toFixed(1)} seconds`;
  }

  rateSlider.addEventListener('input', () => {
    speaker.rate = Number(rateSlider.value);
    updateDurationIndicator();
  });
  volumeSlider.addEventListener('input', () => {
    speaker.volume = Number(volumeSlider.value);
  });

  // --- cue scheduling ---
  const scheduler = new CueScheduler(
    () => media.currentTime,
    (cue) => {
      cueText.textContent = cue.text;
      speaker.speak(cue.text);
      updateDurationIndicator();
    }
  );
  media.addEventListener('play', () => scheduler.start());
  media.addEventListener('pause', () => scheduler.stop());
  media.addEventListener('ended', () => scheduler.stop());
  media.addEventListener('seeked', () => {
    scheduler.seek(media.currentTime);
    updateDurationIndicator();
  });

  // --- question panel and help ---
  const vqaPanel = buildVQAPanel(root, {
    ask: (question, tS, inputMode) => {
      if (jobId === null) return Promise.reject(new ApiError(409, 'no video loaded'));
      return client.askQuestion(jobId, { question, t_s: tS, input_mode: inputMode });
    },
    getPositionS: () => media.currentTime,
    speaker,
    recognitionCtor: options.recognitionCtor,
  });

  const helpScreen = buildHelpScreen(root);

  async function waitForTrack(id: string): Promise<boolean> {
    jobStatus.textContent = 'Preparing descriptions…';
    const status = await client.waitUntilReady(id, pollMs);
    if (status.state === 'failed') {
      jobStatus.textContent = `Generation failed: ${status.detail ?? 'unknown error'}`;
      return false;
    }
    track = await client.getTrack(id);
    cues = track.cues;
    scheduler.setCues(cues);
    regenerateButton.disabled = false;
    jobStatus.textContent = `Descriptions ready: ${cues.length} cues`;
    updateDurationIndicator();
    return true;
  }

  const player: Player = {
    root,
    setupScreen,
    playerScreen,
    vqaPanel,
    helpScreen,
    customization,
    speaker,
    get jobId() {
      return jobId;
    },
    get track() {
      return track;
    },

    async load(source: string, settings: CustomizationSettings) {
      if (!source) {
        customization.showError('Enter a video file or URL first');
        return;
      }
      customization.clearError();
      const sourceField = /^[a-z][a-z0-9+.-]*:\/\//i.test(source)
        ? { url: source }
        : { path: source };
      try {
        const submitted = await client.submitVideo({
          source: sourceField,
          settings,
          session_id: sessionId,
        });
        jobId = submitted.job_id;
        await waitForTrack(jobId);
      } catch (error) {
        if (error instanceof ApiError) customization.showError(error.detail);
        else customization.showError('Could not reach the description service');
      }
    },

    async regenerate(settings: CustomizationSettings) {
      if (jobId === null) return;
      customization.clearError();
      try {
        const result = await client.regenerate(jobId, settings);
        // playback position is untouched; the new track re-anchors on load.
        // Keep pointing at the old job until the new one delivers a track,
        // so questions still work if regeneration fails midway.
        if (await waitForTrack(result.job_id)) jobId = result.job_id;
      } catch (error) {
        if (error instanceof ApiError) customization.showError(error.detail);
        else customization.showError('Could not reach the description service');
      }
    },

    speakCurrentCue() {
      const index = currentCueIndex(cues, media.currentTime);
      if (index >= 0) {
        cueText.textContent = cues[index].text;
        speaker.speak(cues[index].text);
      }
    },

    handleKey(event: KeyboardEvent) {
      if (event.key === 'Escape') {
        if (vqaPanel.open) vqaPanel.hide();
        else if (!helpScreen.hidden) helpScreen.hidden = true;
        return;
      }
      if (isTypingTarget(event.target) || event.ctrlKey || event.altKey || event.metaKey) return;
      switch (event.key) {
        case 'q':
          vqaPanel.toggle();
          event.preventDefault();
          break;
        case 'd':
          player.speakCurrentCue();
          event.preventDefault();
          break;
        case 's':
          speaker.stop();
          event.preventDefault();
          break;
        case '[':
          speaker.rate = clampRate(speaker.rate - 0.25);
          rateSlider.value = String(speaker.rate);
          updateDurationIndicator();
          event.preventDefault();
          break;
        case ']':
          speaker.rate = clampRate(speaker.rate + 0.25);
          rateSlider.value = String(speaker.rate);
          updateDurationIndicator();
          event.preventDefault();
          break;
        case 'h':
          helpScreen.hidden = !helpScreen.hidden;
          event.preventDefault();
          break;
      }
    },

    dispose() {
      root.ownerDocument.removeEventListener('keydown', keyListener);
      scheduler.stop();
      speaker.stop();
    },
  };

  const keyListener = (event: KeyboardEvent): void => player.handleKey(event);
  root.ownerDocument.addEventListener('keydown', keyListener);
  return player;
}
