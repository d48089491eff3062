// Virtual 9x9 touch pad bound to a DOM container.
//
// One render loop drives everything: at every clock tick the current
// pointer state is rasterized to a footprint, painted onto the heatmap,
// and handed to the socket.  Idle ticks still send all-zero frames so the
// service sees an unbroken 15 Hz stream.

import {
  DEFAULT_AMPLITUDE,
  DEFAULT_SIGMA,
  SIGMA_MAX,
  SIGMA_MIN,
  Touch,
  mirrorTouch,
  renderFootprint,
} from "./footprint";
import { ClockHooks, FrameClock } from "./frameClock";
import { ConnectionState, PadSocket } from "./padSocket";
import {
  FRAME_RATE_HZ,
  GRID_N,
  PredictionMessage,
  TAXELS,
  makeFrame,
} from "./protocol";

export interface PadAppOptions {
  root: HTMLElement;
  socket: PadSocket;
  rateHz?: number;
  clockHooks?: ClockHooks;
}

interface PointerLikeEvent {
  clientX: number;
  clientY: number;
  shiftKey?: boolean;
  pointerId?: number;
  pointerType?: string;
  pressure?: number;
}

const CONNECTION_TEXT: Record<ConnectionState, string> = {
  connecting: "connecting...",
  open: "connected",
  reconnecting: "reconnecting...",
  closed: "offline",
};

export class PadApp {
  readonly gridElement: HTMLElement;
  readonly cells: HTMLElement[] = [];
  readonly sigmaSlider: HTMLInputElement;
  readonly mirrorToggle: HTMLInputElement;
  readonly connectionLabel: HTMLElement;
  readonly activeLabel: HTMLElement;
  readonly predictionLabel: HTMLElement;
  readonly predictionMeta: HTMLElement;
  readonly scoresList: HTMLElement;

  sigma = DEFAULT_SIGMA;
  lastFrame = new Float64Array(TAXELS);
  framesSent = 0;
  lastPrediction: PredictionMessage | null = null;

  private readonly socket: PadSocket;
  private readonly clock: FrameClock;
  private readonly pointers = new Map<number, Touch>();
  private shiftHeld = false;

  constructor(options: PadAppOptions) {
    this.socket = options.socket;
    const root = options.root;
    root.classList.add("pad-app");

    const status = document.createElement("div");
    status.className = "pad-status";
    this.connectionLabel = document.createElement("span");
    this.connectionLabel.className = "pad-conn";
    this.connectionLabel.textContent = CONNECTION_TEXT.closed;
    this.activeLabel = document.createElement("span");
    this.activeLabel.className = "pad-active";
    this.activeLabel.textContent = "idle";
    status.append(this.connectionLabel, this.activeLabel);
    root.appendChild(status);

    this.gridElement = document.createElement("div");
    this.gridElement.className = "pad-grid";
    this.gridElement.style.touchAction = "none";
    for (let i = 0; i < TAXELS; i++) {
      const cell = document.createElement("div");
      cell.className = "pad-cell";
      cell.dataset.index = String(i);
      cell.style.opacity = "0";
      this.cells.push(cell);
      this.gridElement.appendChild(cell);
    }
    root.appendChild(this.gridElement);

    const controls = document.createElement("div");
    controls.className = "pad-controls";
    const sigmaLabel = document.createElement("label");
    sigmaLabel.textContent = "finger width ";
    this.sigmaSlider = document.createElement("input");
    this.sigmaSlider.type = "range";
    this.sigmaSlider.min = String(SIGMA_MIN);
    this.sigmaSlider.max = String(SIGMA_MAX);
    this.sigmaSlider.step = "0.05";
    this.sigmaSlider.value = String(DEFAULT_SIGMA);
    this.sigmaSlider.addEventListener("input", () => {
      const value = Number(this.sigmaSlider.value);
      if (Number.isFinite(value)) {
        this.sigma = Math.min(SIGMA_MAX, Math.max(SIGMA_MIN, value));
      }
    });
    sigmaLabel.appendChild(this.sigmaSlider);
    const mirrorLabel = document.createElement("label");
    this.mirrorToggle = document.createElement("input");
    this.mirrorToggle.type = "checkbox";
    mirrorLabel.append(this.mirrorToggle, " two fingers (or hold Shift)");
    controls.append(sigmaLabel, mirrorLabel);
    root.appendChild(controls);

    const panel = document.createElement("div");
    panel.className = "pad-panel";
    this.predictionLabel = document.createElement("div");
    this.predictionLabel.className = "pad-label";
    this.predictionLabel.textContent = "-";
    this.predictionMeta = document.createElement("div");
    this.predictionMeta.className = "pad-meta";
    this.scoresList = document.createElement("ul");
    this.scoresList.className = "pad-scores";
    panel.append(this.predictionLabel, this.predictionMeta, this.scoresList);
    root.appendChild(panel);

    this.bindPointerEvents();

    this.socket.onPrediction = (msg) => this.showPrediction(msg);
    this.socket.onActive = (active) => {
      this.activeLabel.textContent = active ? "touch" : "idle";
    };
    this.socket.onConnection = (state) => {
      this.connectionLabel.textContent = CONNECTION_TEXT[state];
      this.connectionLabel.classList.toggle("pad-conn-down", state !== "open");
    };

    this.clock = new FrameClock(
      options.rateHz ?? FRAME_RATE_HZ,
      (t) => this.tick(t),
      options.clockHooks,
    );
  }

  start(): void {
    this.socket.connect();
    this.clock.start();
  }

  stop(): void {
    this.clock.stop();
    this.socket.close();
  }

  /** Current touches including the mirror twin when two-finger mode is on. */
  activeTouches(): Touch[] {
    const touches = Array.from(this.pointers.values());
    if (touches.length > 0 && (this.mirrorToggle.checked || this.shiftHeld)) {
      return touches.concat(touches.map(mirrorTouch));
    }
    return touches;
  }

  private tick(t: number): void {
    const frame = renderFootprint(this.activeTouches(), this.sigma);
    this.lastFrame = frame;
    this.paint(frame);
    this.socket.sendFrame(makeFrame(t, frame));
    this.framesSent += 1;
  }

  private paint(frame: Float64Array): void {
    for (let i = 0; i < TAXELS; i++) {
      this.cells[i]!.style.opacity = frame[i]!.toFixed(3);
    }
  }

  private showPrediction(msg: PredictionMessage): void {
    this.lastPrediction = msg;
    this.predictionLabel.textContent = msg.label;
    this.predictionMeta.textContent =
      `${Math.round(msg.segment_ms)} ms segment, ` +
      `${msg.latency_ms.toFixed(1)} ms latency`;
    this.scoresList.textContent = "";
    const ranked = Object.entries(msg.scores).sort((a, b) => b[1] - a[1]);
    for (const [name, score] of ranked.slice(0, 3)) {
      const item = document.createElement("li");
      item.textContent = `${name} ${score.toFixed(3)}`;
      this.scoresList.appendChild(item);
    }
  }

  private bindPointerEvents(): void {
    const grid = this.gridElement;
    grid.addEventListener("pointerdown", (ev) => {
      this.updatePointer(ev as PointerLikeEvent);
    });
    grid.addEventListener("pointermove", (ev) => {
      const event = ev as PointerLikeEvent;
      if (this.pointers.has(event.pointerId ?? 0)) this.updatePointer(event);
    });
    const lift = (ev: Event) => {
      const event = ev as unknown as PointerLikeEvent;
      this.pointers.delete(event.pointerId ?? 0);
      this.shiftHeld = event.shiftKey ?? this.shiftHeld;
    };
    grid.addEventListener("pointerup", lift);
    grid.addEventListener("pointercancel", lift);
    grid.addEventListener("pointerleave", lift);
  }

  private updatePointer(event: PointerLikeEvent): void {
    const rect = this.gridElement.getBoundingClientRect();
    if (rect.width <= 0 || rect.height <= 0) return;
    const fx = (event.clientX - rect.left) / rect.width;
    const fy = (event.clientY - rect.top) / rect.height;
    const clamp01 = (v: number) => Math.min(1, Math.max(0, v));
    this.pointers.set(event.pointerId ?? 0, {
      x: clamp01(fx) * GRID_N,
      y: (1 - clamp01(fy)) * GRID_N,
      amplitude: pointerAmplitude(event),
    });
    this.shiftHeld = event.shiftKey ?? false;
  }
}

/** Pen pressure maps straight to amplitude; everything else presses at 0.8. */
export function pointerAmplitude(event: {
  pointerType?: string;
  pressure?: number;
}): number {
  if (
    event.pointerType === "pen" &&
    typeof event.pressure === "number" &&
    Number.isFinite(event.pressure) &&
    event.pressure > 0
  ) {
    return Math.min(1, event.pressure);
  }
  return DEFAULT_AMPLITUDE;
}
