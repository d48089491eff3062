// Drift-free fixed-rate ticker.
//
// Tick n is scheduled at start + n * period against the wall clock, so a
// late timer callback shifts one tick, not the whole schedule.  Tick
// timestamps are the canonical targets (round(n * 1000 / rate)), which is
// what the recognition service expects frame times to look like.

export interface ClockHooks {
  now(): number;
  setTimeout(fn: () => void, ms: number): unknown;
  clearTimeout(handle: unknown): void;
}

const realHooks: ClockHooks = {
  now: () => performance.now(),
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (handle) => clearTimeout(handle as ReturnType<typeof setTimeout>),
};

export class FrameClock {
  private readonly periodMs: number;
  private readonly hooks: ClockHooks;
  private handle: unknown = null;
  private startedAt = 0;
  private tickIndex = 0;
  running = false;

  constructor(
    rateHz: number,
    private readonly onTick: (tMs: number) => void,
    hooks: ClockHooks = realHooks,
  ) {
    if (!(rateHz > 0)) throw new Error(`rate must be positive, got ${rateHz}`);
    this.periodMs = 1000 / rateHz;
    this.hooks = hooks;
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    this.startedAt = this.hooks.now();
    this.tickIndex = 0;
    this.fire();
  }

  stop(): void {
    if (!this.running) return;
    this.running = false;
    if (this.handle !== null) {
      this.hooks.clearTimeout(this.handle);
      this.handle = null;
    }
  }

  private fire(): void {
    if (!this.running) return;
    const t = Math.round(this.tickIndex * this.periodMs);
    this.tickIndex += 1;
    this.onTick(t);
    if (!this.running) return;
    const target = this.startedAt + this.tickIndex * this.periodMs;
    const delay = Math.max(0, target - this.hooks.now());
    this.handle = this.hooks.setTimeout(() => this.fire(), delay);
  }
}
