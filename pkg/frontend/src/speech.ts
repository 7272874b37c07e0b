/** Speaks description text through the platform speech synthesis.
 *
 * Video audio ducks to 30% of its volume while a description plays and
 * restores when speech ends, errors, or is stopped. When the platform has
 * no speech synthesis the text still reaches the listener through the
 * onUnavailable fallback (the player routes it to a live region).
 */

import { clampRate, clampVolume } from './state.js';

export const DUCK_FACTOR = 0.3; // -70% while narrating

export interface UtteranceLike {
  text: string;
  rate: number;
  volume: number;
  onend: (() => void) | null;
  onerror: (() => void) | null;
}

export interface SynthLike {
  speak(utterance: UtteranceLike): void;
  cancel(): void;
}

export interface DuckTarget {
  volume: number;
}

export interface SpeechPort {
  synth: SynthLike;
  makeUtterance(text: string): UtteranceLike;
}

/** The real browser port, or null where speechSynthesis is missing. */
export function platformSpeech(): SpeechPort | null {
  if (typeof window === 'undefined' || !('speechSynthesis' in window)) return null;
  return {
    synth: window.speechSynthesis as unknown as SynthLike,
    makeUtterance: (text) => new SpeechSynthesisUtterance(text) as unknown as UtteranceLike,
  };
}

export interface SpeakerOptions {
  port?: SpeechPort | null;
  duckTarget?: DuckTarget | null;
  onUnavailable?: (text: string) => void;
  onSpeakingChange?: (speaking: boolean) => void;
}

export class DescriptionSpeaker {
  private port: SpeechPort | null;
  private duckTarget: DuckTarget | null;
  private savedVolume: number | null = null;
  private _rate = 1.0;
  private _volume = 1.0;
  private _speaking = false;
  private readonly onUnavailable: (text: string) => void;
  private readonly onSpeakingChange: (speaking: boolean) => void;

  constructor(options: SpeakerOptions = {}) {
    this.port = options.port !== undefined ? options.port : platformSpeech();
    this.duckTarget = options.duckTarget ?? null;
    this.onUnavailable = options.onUnavailable ?? (() => {});
    this.onSpeakingChange = options.onSpeakingChange ?? (() => {});
  }

  get supported(): boolean {
    return this.port !== null;
  }

  get speaking(): boolean {
    return this._speaking;
  }

  get rate(): number {
    return this._rate;
  }

  set rate(value: number) {
    this._rate = clampRate(value);
  }

  get volume(): number {
    return this._volume;
  }

  set volume(value: number) {
    this._volume = clampVolume(value);
  }

  setDuckTarget(target: DuckTarget | null): void {
    this.restore();
    this.duckTarget = target;
  }

  speak(text: string): void {
    if (!text.trim()) return;
    if (this.port === null) {
      this.onUnavailable(text);
      return;
    }
    this.stop();
    const utterance = this.port.makeUtterance(text);
    utterance.rate = this._rate;
    utterance.volume = this._volume;
    utterance.onend = () => this.finish();
    utterance.onerror = () => this.finish();
    this.duck();
    this._speaking = true;
    this.onSpeakingChange(true);
    this.port.synth.speak(utterance);
  }

  /** Halt current speech immediately and restore the video volume. */
  stop(): void {
    if (this.port !== null) this.port.synth.cancel();
    this.finish();
  }

  private finish(): void {
    this.restore();
    if (this._speaking) {
      this._speaking = false;
      this.onSpeakingChange(false);
    }
  }

  private duck(): void {
    if (this.duckTarget === null || this.savedVolume !== null) return;
    this.savedVolume = this.duckTarget.volume;
    this.duckTarget.volume = this.savedVolume * DUCK_FACTOR;
  }

  private restore(): void {
    if (this.duckTarget !== null && this.savedVolume !== null) {
      this.duckTarget.volume = this.savedVolume;
    }
    this.savedVolume = null;
  }
}
