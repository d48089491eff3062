// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import { renderFootprint, footprintMass } from "../src/footprint";
import { ClockHooks } from "../src/frameClock";
import { PadApp } from "../src/padApp";
import { PadSocket, SocketLike } from "../src/padSocket";
import { TAXELS } from "../src/protocol";

const GRID_PX = 180; // mocked layout box; jsdom computes no real geometry

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onopen: (() => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {}
}

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

interface App {
  app: PadApp;
  wire: FakeSocket;
  timers: FakeTimers;
  frames(): number[][];
}

function buildApp(): App {
  const wire = new FakeSocket();
  const timers = new FakeTimers();
  const socket = new PadSocket({
    url: "ws://test/stream",
    makeSocket: () => wire,
    now: () => timers.now(),
    setTimeout: (fn, ms) => timers.setTimeout(fn, ms),
    clearTimeout: (handle) => timers.clearTimeout(handle),
  });
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = new PadApp({ root, socket, clockHooks: timers });
  mockRect(app.gridElement);
  app.start();
  wire.onopen!();
  return {
    app,
    wire,
    timers,
    frames: () => wire.sent.map((s) => JSON.parse(s).p as number[]),
  };
}

function mockRect(element: HTMLElement): void {
  element.getBoundingClientRect = () =>
    ({
      left: 0,
      top: 0,
      width: GRID_PX,
      height: GRID_PX,
      right: GRID_PX,
      bottom: GRID_PX,
      x: 0,
      y: 0,
      toJSON: () => ({}),
    }) as DOMRect;
}

function pointer(
  element: HTMLElement,
  type: string,
  clientX: number,
  clientY: number,
  shiftKey = false,
): void {
  element.dispatchEvent(
    new MouseEvent(type, { clientX, clientY, shiftKey, bubbles: true }),
  );
}

/** Pad coords (x right, y up) to mocked pixel coords (y down). */
function px(x: number, y: number): [number, number] {
  return [(x / 9) * GRID_PX, ((9 - y) / 9) * GRID_PX];
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("PadApp", () => {
  it("sends all-zero frames while idle", () => {
    const { timers, frames } = buildApp();
    timers.advance(500);
    const sent = frames();
    expect(sent.length).toBeGreaterThanOrEqual(7);
    for (const p of sent) {
      expect(p.length).toBe(TAXELS);
      expect(p.every((v) => v === 0)).toBe(true);
    }
  });

  it("rasterizes the pointer exactly like the pure footprint", () => {
    const { app, timers, frames } = buildApp();
    const [cx, cy] = px(4.5, 4.5);
    pointer(app.gridElement, "pointerdown", cx, cy);
    timers.advance(67);
    const sent = frames();
    const last = sent[sent.length - 1]!;
    const expected = renderFootprint(
      [{ x: 4.5, y: 4.5, amplitude: 0.8 }],
      app.sigma,
    );
    for (let i = 0; i < TAXELS; i++) {
      expect(last[i]).toBeCloseTo(expected[i]!, 12);
    }
    expect(Math.max(...last)).toBeGreaterThan(0.5);
  });

  it("paints the heatmap cell under the finger", () => {
    const { app, timers } = buildApp();
    const [cx, cy] = px(0.5, 0.5); // bottom-left corner cell, index 72
    pointer(app.gridElement, "pointerdown", cx, cy);
    timers.advance(67);
    expect(Number(app.cells[72]!.style.opacity)).toBeGreaterThan(0.5);
    expect(Number(app.cells[8]!.style.opacity)).toBe(0);
  });

  it("tracks pointer movement and clears on release", () => {
    const { app, timers, frames } = buildApp();
    const [dx, dy] = px(2.5, 4.5);
    pointer(app.gridElement, "pointerdown", dx, dy);
    timers.advance(67);
    const [mx, my] = px(6.5, 4.5);
    pointer(app.gridElement, "pointermove", mx, my);
    timers.advance(67);
    pointer(app.gridElement, "pointerup", mx, my);
    timers.advance(67);
    const sent = frames();
    const during = sent[sent.length - 2]!;
    const after = sent[sent.length - 1]!;
    // peak column moved to the right half before release
    const peak = during.indexOf(Math.max(...during));
    expect(peak % 9).toBeGreaterThan(4);
    expect(after.every((v) => v === 0)).toBe(true);
  });

  it("mirrors the pointer when two-finger mode is on", () => {
    const { app, timers, frames } = buildApp();
    app.mirrorToggle.checked = true;
    const [cx, cy] = px(3.0, 4.5);
    pointer(app.gridElement, "pointerdown", cx, cy);
    timers.advance(67);
    const single = renderFootprint([{ x: 3.0, y: 4.5, amplitude: 0.8 }], app.sigma);
    const sent = frames();
    const last = sent[sent.length - 1]!;
    const ratio = footprintMass(last) / footprintMass(single);
    expect(ratio).toBeGreaterThan(1.9);
    expect(ratio).toBeLessThan(2.1);
  });

  it("holding shift mirrors without the checkbox", () => {
    const { app, timers, frames } = buildApp();
    const [cx, cy] = px(3.0, 4.5);
    pointer(app.gridElement, "pointerdown", cx, cy, true);
    timers.advance(67);
    const sent = frames();
    const last = sent[sent.length - 1]!;
    const single = renderFootprint([{ x: 3.0, y: 4.5, amplitude: 0.8 }], app.sigma);
    expect(footprintMass(last) / footprintMass(single)).toBeGreaterThan(1.9);
  });

  it("the width slider widens the footprint", () => {
    const { app, timers, frames } = buildApp();
    const [cx, cy] = px(4.5, 4.5);
    pointer(app.gridElement, "pointerdown", cx, cy);
    timers.advance(67);
    const narrowCells = frames().at(-1)!.filter((v) => v > 0.05).length;
    app.sigmaSlider.value = "1.2";
    app.sigmaSlider.dispatchEvent(new Event("input"));
    expect(app.sigma).toBe(1.2);
    timers.advance(67);
    const wideCells = frames().at(-1)!.filter((v) => v > 0.05).length;
    expect(wideCells).toBeGreaterThan(narrowCells);
  });

  it("displays predictions and segmenter state from the service", () => {
    const { app, wire } = buildApp();
    wire.onmessage!({ data: '{"type":"state","active":true}' });
    expect(app.activeLabel.textContent).toBe("touch");
    wire.onmessage!({ data: '{"type":"state","active":false}' });
    expect(app.activeLabel.textContent).toBe("idle");
    wire.onmessage!({
      data: JSON.stringify({
        type: "prediction",
        label: "swipe_up",
        scores: { swipe_up: 0.9, tap: 0.1 },
        segment_ms: 660,
        latency_ms: 2.4,
      }),
    });
    expect(app.predictionLabel.textContent).toBe("swipe_up");
    expect(app.predictionMeta.textContent).toContain("660 ms segment");
    expect(app.scoresList.children.length).toBe(2);
    expect(app.scoresList.children[0]!.textContent).toBe("swipe_up 0.900");
  });

  it("shows the connection state, including reconnects", () => {
    const { app, wire, timers } = buildApp();
    expect(app.connectionLabel.textContent).toBe("connected");
    wire.onclose!();
    expect(app.connectionLabel.textContent).toBe("reconnecting...");
    timers.advance(1000);
    expect(app.connectionLabel.textContent).toBe("reconnecting...");
  });

  it("keeps a 15 Hz cadence under automated pointer playback", async () => {
    // real timers and a real frame clock; only the wire is fake
    const wire = new FakeSocket();
    const socket = new PadSocket({
      url: "ws://test/stream",
      makeSocket: () => wire,
    });
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new PadApp({ root, socket });
    mockRect(app.gridElement);
    app.start();
    wire.onopen!();
    const started = performance.now();
    for (let step = 0; step < 20; step++) {
      const [cx, cy] = px(2 + (step % 10) * 0.5, 4.5);
      pointer(app.gridElement, step === 0 ? "pointerdown" : "pointermove", cx, cy);
      await new Promise((resolve) => setTimeout(resolve, 50));
    }
    const elapsed = performance.now() - started;
    app.stop();
    const rate = (wire.sent.length / elapsed) * 1000;
    expect(rate).toBeGreaterThan(14);
    expect(rate).toBeLessThan(16);
    const touched = wire.sent.some((s) =>
      (JSON.parse(s).p as number[]).some((v) => v > 0),
    );
    expect(touched).toBe(true);
  });
});
