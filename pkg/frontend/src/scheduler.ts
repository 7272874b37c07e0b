/** Fires description cues as playback crosses their start times.
 *
 * Polls the playback position every 250 ms, which keeps firing latency
 * inside the 250 ms budget. Seeking recomputes the current index without
 * replaying everything that was skipped; cues always fire in track order.
 */

import type { Cue } from './api.js';
import { currentCueIndex } from './state.js';

export const TICK_MS = 250;

// index of the last cue starting strictly before `positionS`; a cue exactly
// at the position still counts as pending, so an opening cue at 0 fires
function anchorIndex(cues: readonly Cue[], positionS: number): number {
  let index = -1;
  for (let i = 0; i < cues.length; i++) {
    if (cues[i].start_s < positionS) index = i;
    else break;
  }
  return index;
}

export class CueScheduler {
  private cues: readonly Cue[] = [];
  private lastIndex = -1;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly getPositionS: () => number,
    private readonly onCue: (cue: Cue, index: number) => void,
    private readonly tickMs: number = TICK_MS
  ) {}

  setCues(cues: readonly Cue[]): void {
    this.cues = cues;
    // position unchanged, so re-anchor against the new track
    this.lastIndex = anchorIndex(cues, this.getPositionS());
  }

  get running(): boolean {
    return this.timer !== null;
  }

  /** Resume ticking. Keeps the consumed-cue anchor from before the pause. */
  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => this.tick(), this.tickMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** Call on a seek: re-anchor so skipped cues do not replay. */
  seek(positionS: number): void {
    this.lastIndex = anchorIndex(this.cues, positionS);
  }

  private tick(): void {
    const index = currentCueIndex(this.cues, this.getPositionS());
    if (index > this.lastIndex) {
      // normal playback advances one cue per tick; fire only the newest
      // so a missed tick never causes overlapping stale speech
      this.lastIndex = index;
      this.onCue(this.cues[index], index);
    } else if (index < this.lastIndex) {
      // position jumped backwards outside seek(); re-anchor silently
      this.lastIndex = index;
    }
  }
}
