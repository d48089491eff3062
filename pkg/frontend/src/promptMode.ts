// Prompted practice mode: the pad asks for gestures one at a time and
// keeps a running prompted-versus-predicted tally.
//
// A prompt with no touch within the timeout window counts as unanswered
// and occupies a dedicated final column, so every confusion row still sums
// to the number of times that class was prompted.

import { GESTURE_NAMES, GestureName } from "./protocol";

export const PROMPT_TIMEOUT_MS = 10000;
export const UNANSWERED_COLUMN = GESTURE_NAMES.length;

export interface PromptRecord {
  prompted: GestureName;
  predicted: string | null;
}

export interface PromptModeOptions {
  seed: number;
  rounds?: number;
  timeoutMs?: number;
  now?: () => number;
  setTimeout?: (fn: () => void, ms: number) => unknown;
  clearTimeout?: (handle: unknown) => void;
  onUpdate?: () => void;
}

/** Deterministic 32-bit PRNG so a seed always yields the same prompt order. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function shuffled<T>(items: readonly T[], rand: () => number): T[] {
  const out = items.slice();
  for (let i = out.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    const tmp = out[i]!;
    out[i] = out[j]!;
    out[j] = tmp;
  }
  return out;
}

export class PromptSession {
  readonly prompts: GestureName[];
  readonly records: PromptRecord[] = [];

  private readonly timeoutMs: number;
  private readonly setTimeoutFn: (fn: () => void, ms: number) => unknown;
  private readonly clearTimeoutFn: (handle: unknown) => void;
  private readonly onUpdate: () => void;

  private index = -1;
  private touched = false;
  private timerHandle: unknown = null;
  private running = false;

  constructor(options: PromptModeOptions) {
    const rounds = options.rounds ?? 1;
    const rand = mulberry32(options.seed);
    const prompts: GestureName[] = [];
    for (let r = 0; r < rounds; r++) {
      prompts.push(...shuffled(GESTURE_NAMES, rand));
    }
    this.prompts = prompts;
    this.timeoutMs = options.timeoutMs ?? PROMPT_TIMEOUT_MS;
    this.setTimeoutFn = options.setTimeout ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimeoutFn =
      options.clearTimeout ??
      ((handle) => clearTimeout(handle as ReturnType<typeof setTimeout>));
    this.onUpdate = options.onUpdate ?? (() => {});
  }

  get done(): boolean {
    return this.running && this.index >= this.prompts.length;
  }

  current(): GestureName | null {
    if (!this.running || this.done) return null;
    return this.prompts[this.index] ?? null;
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    this.index = -1;
    this.advance();
  }

  /** The pad reports finger contact; an armed skip timer stands down. */
  noteTouch(): void {
    if (this.current() === null) return;
    this.touched = true;
    this.disarm();
  }

  feedPrediction(label: string): void {
    const prompted = this.current();
    if (prompted === null) return;
    this.records.push({ prompted, predicted: label });
    this.advance();
  }

  /** 10 prompted rows by 11 columns; the last column counts unanswered. */
  confusion(): number[][] {
    const n = GESTURE_NAMES.length;
    const matrix = Array.from({ length: n }, () => new Array(n + 1).fill(0));
    for (const record of this.records) {
      const row = GESTURE_NAMES.indexOf(record.prompted);
      const col =
        record.predicted === null
          ? UNANSWERED_COLUMN
          : GESTURE_NAMES.indexOf(record.predicted as GestureName);
      matrix[row]![col < 0 ? UNANSWERED_COLUMN : col] += 1;
    }
    return matrix;
  }

  summaryLines(): string[] {
    const matrix = this.confusion();
    const lines: string[] = [];
    let correct = 0;
    for (let r = 0; r < GESTURE_NAMES.length; r++) {
      const row = matrix[r]!;
      const total = row.reduce((a, b) => a + b, 0);
      if (total === 0) continue;
      const hits = row[r]!;
      correct += hits;
      const misses = row[UNANSWERED_COLUMN]!;
      let line = `${GESTURE_NAMES[r]}: ${hits}/${total}`;
      if (misses > 0) line += ` (${misses} unanswered)`;
      lines.push(line);
    }
    lines.push(`total: ${correct}/${this.records.length}`);
    return lines;
  }

  private advance(): void {
    this.disarm();
    this.touched = false;
    this.index += 1;
    if (!this.done) {
      this.timerHandle = this.setTimeoutFn(() => {
        this.timerHandle = null;
        this.skipCurrent();
      }, this.timeoutMs);
    }
    this.onUpdate();
  }

  private skipCurrent(): void {
    const prompted = this.current();
    if (prompted === null || this.touched) return;
    this.records.push({ prompted, predicted: null });
    this.advance();
  }

  private disarm(): void {
    if (this.timerHandle !== null) {
      this.clearTimeoutFn(this.timerHandle);
      this.timerHandle = null;
    }
  }
}
