import { describe, expect, it } from "vitest";

import { ClockHooks, FrameClock } from "../src/frameClock";

/** Manually stepped clock: timers fire only through advance(). */
class FakeTimers implements ClockHooks {
  time = 0;
  private queue: { at: number; fn: () => void; id: number }[] = [];
  private nextId = 1;

  now(): number {
    return this.time;
  }

  setTimeout(fn: () => void, ms: number): unknown {
    const id = this.nextId++;
    this.queue.push({ at: this.time + ms, fn, id });
    return id;
  }

  clearTimeout(handle: unknown): void {
    this.queue = this.queue.filter((entry) => entry.id !== handle);
  }

  advance(ms: number): void {
    const target = this.time + ms;
    for (;;) {
      this.queue.sort((a, b) => a.at - b.at);
      const next = this.queue[0];
      if (!next || next.at > target) break;
      this.queue.shift();
      this.time = next.at;
      next.fn();
    }
    this.time = target;
  }
}

describe("FrameClock", () => {
  it("emits canonical tick timestamps at 15 Hz", () => {
    const timers = new FakeTimers();
    const ticks: number[] = [];
    const clock = new FrameClock(15, (t) => ticks.push(t), timers);
    clock.start();
    timers.advance(999);
    // ticks at round(n * 1000 / 15): 0, 67, 133, ..., 933 within one second
    expect(ticks.length).toBe(15);
    expect(ticks.slice(0, 4)).toEqual([0, 67, 133, 200]);
    expect(ticks[14]).toBe(933);
  });

  it("does not drift when callbacks run late", () => {
    const timers = new FakeTimers();
    const fired: number[] = [];
    const clock = new FrameClock(15, () => {
      fired.push(timers.time);
      timers.time += 3; // each tick handler burns 3 ms
    }, timers);
    clock.start();
    timers.advance(2000);
    // absolute schedule: late handlers never push later ticks off target
    const period = 1000 / 15;
    for (let i = 1; i < fired.length; i++) {
      expect(Math.abs(fired[i]! - i * period)).toBeLessThan(4);
    }
    expect(fired.length).toBeGreaterThanOrEqual(29);
  });

  it("stops cleanly and can restart", () => {
    const timers = new FakeTimers();
    const ticks: number[] = [];
    const clock = new FrameClock(15, (t) => ticks.push(t), timers);
    clock.start();
    timers.advance(200);
    clock.stop();
    const seen = ticks.length;
    timers.advance(1000);
    expect(ticks.length).toBe(seen);
    clock.start();
    timers.advance(100);
    expect(ticks.length).toBeGreaterThan(seen);
  });

  it("holds 15 plus or minus 1 Hz against the real clock", async () => {
    let count = 0;
    const clock = new FrameClock(15, () => {
      count += 1;
    });
    const started = performance.now();
    clock.start();
    await new Promise((resolve) => setTimeout(resolve, 1000));
    clock.stop();
    const elapsed = performance.now() - started;
    const rate = (count / elapsed) * 1000;
    expect(rate).toBeGreaterThan(14);
    expect(rate).toBeLessThan(16);
  });

  it("rejects a nonpositive rate", () => {
    expect(() => new FrameClock(0, () => {})).toThrow(/rate/);
  });
});
