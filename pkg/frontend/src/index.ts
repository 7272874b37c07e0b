export {
  ApiClient,
  ApiError,
  DEFAULT_SETTINGS,
  type Cue,
  type CustomizationSettings,
  type Exchange,
  type JobStatus,
  type Ratings,
  type TrackDoc,
} from './api.js';
export { audit, accessibleName, type Violation } from './a11y.js';
export { buildCustomizationPanel, FREE_FORM_MAX_CHARS } from './customization.js';
export { buildHelpScreen, KEYBOARD_MAP } from './help.js';
export { createPlayer, type Player, type PlayerOptions, type MediaLike } from './player.js';
export { CueScheduler, TICK_MS } from './scheduler.js';
export { DescriptionSpeaker, DUCK_FACTOR, platformSpeech, type SpeechPort } from './speech.js';
export {
  clampRate,
  clampVolume,
  currentCueIndex,
  estimatedCueSeconds,
  NARRATION_WORDS_PER_SECOND,
  TTS_RATE_MAX,
  TTS_RATE_MIN,
  type PlayerState,
} from './state.js';
export { buildVQAPanel, type VQAPanel } from './vqa.js';
