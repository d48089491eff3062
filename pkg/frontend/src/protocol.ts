// Wire types for the recognition service WebSocket endpoint.
//
// Client -> server: pressure frames as JSON (browsers cannot speak the
// sensor's native UDP transport).  Server -> client: gesture predictions
// and segmenter state changes.

export const GRID_N = 9;
export const TAXELS = GRID_N * GRID_N;
export const FRAME_RATE_HZ = 15;
export const FRAME_PERIOD_MS = 1000 / FRAME_RATE_HZ;
export const DEFAULT_ENDPOINT = "ws://localhost:8080/stream";

export const GESTURE_NAMES = [
  "tap",
  "double_tap",
  "swipe_down",
  "swipe_up",
  "swipe_right",
  "swipe_left",
  "circle_cw",
  "circle_ccw",
  "swipe_up_2f",
  "swipe_down_2f",
] as const;

export type GestureName = (typeof GESTURE_NAMES)[number];

export interface ClientFrame {
  type: "frame";
  t: number;
  p: number[];
}

export interface PredictionMessage {
  type: "prediction";
  label: string;
  scores: Record<string, number>;
  segment_ms: number;
  latency_ms: number;
}

export interface StateMessage {
  type: "state";
  active: boolean;
}

export type ServerMessage = PredictionMessage | StateMessage;

const SCORE_SUM_TOLERANCE = 1e-6;

export function makeFrame(t: number, p: ArrayLike<number>): ClientFrame {
  if (p.length !== TAXELS) {
    throw new Error(`frame needs ${TAXELS} values, got ${p.length}`);
  }
  return { type: "frame", t: Math.round(t), p: Array.from(p) };
}

export function scoresSum(scores: Record<string, number>): number {
  let sum = 0;
  for (const value of Object.values(scores)) sum += value;
  return sum;
}

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

/** Parse one server message; anything malformed comes back as null. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;

  if (msg.type === "state") {
    if (typeof msg.active !== "boolean") return null;
    return { type: "state", active: msg.active };
  }

  if (msg.type === "prediction") {
    if (typeof msg.label !== "string") return null;
    if (!isFiniteNumber(msg.segment_ms) || !isFiniteNumber(msg.latency_ms)) {
      return null;
    }
    const scores = msg.scores;
    if (typeof scores !== "object" || scores === null) return null;
    const entries = Object.entries(scores as Record<string, unknown>);
    if (entries.length === 0) return null;
    for (const [, value] of entries) {
      if (!isFiniteNumber(value)) return null;
    }
    const checked = scores as Record<string, number>;
    if (Math.abs(scoresSum(checked) - 1) > SCORE_SUM_TOLERANCE) return null;
    return {
      type: "prediction",
      label: msg.label,
      scores: checked,
      segment_ms: msg.segment_ms,
      latency_ms: msg.latency_ms,
    };
  }

  return null;
}
