/** Player state model and the pure helpers the UI derives its display from. */

import type { Cue, CustomizationSettings } from './api.js';

export const TTS_RATE_MIN = 0.5;
export const TTS_RATE_MAX = 2.0;
export const NARRATION_WORDS_PER_SECOND = 2.5;

export interface PlayerState {
  positionS: number;
  playing: boolean;
  currentCueIndex: number;
  ttsRate: number;
  ttsVolume: number;
  settingsDraft: CustomizationSettings;
  vqaPending: boolean;
}

export function clampRate(rate: number): number {
  if (!Number.isFinite(rate)) return 1.0;
  return Math.min(TTS_RATE_MAX, Math.max(TTS_RATE_MIN, rate));
}

export function clampVolume(volume: number): number {
  if (!Number.isFinite(volume)) return 1.0;
  return Math.min(1.0, Math.max(0.0, volume));
}

/** Index of the last cue with start_s <= position, or -1 before the first. */
export function currentCueIndex(cues: readonly Cue[], positionS: number): number {
  let index = -1;
  for (let i = 0; i < cues.length; i++) {
    if (cues[i].start_s <= positionS) index = i;
    else break;
  }
  return index;
}

/** Estimated spoken duration of a cue at the given rate multiplier. */
export function estimatedCueSeconds(cue: Cue, rate: number): number {
  return cue.word_count / (NARRATION_WORDS_PER_SECOND * clampRate(rate));
}
