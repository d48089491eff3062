// Browser entry point: builds the pad, connects to the recognition
// service, and offers an optional prompted practice run.

import { PadApp } from "./padApp";
import { PadSocket } from "./padSocket";
import { PromptSession } from "./promptMode";

function endpointFromLocation(): string {
  const params = new URLSearchParams(window.location.search);
  const override = params.get("ws");
  if (override) return override;
  const host = window.location.hostname || "localhost";
  return `ws://${host}:8080/stream`;
}

function seedFromLocation(): number {
  const params = new URLSearchParams(window.location.search);
  const seed = Number(params.get("seed"));
  return Number.isFinite(seed) ? seed : 0;
}

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

const socket = new PadSocket({ url: endpointFromLocation() });
const app = new PadApp({ root, socket });
app.start();

// prompted practice: chain onto the handlers the pad already installed
const promptPanel = document.createElement("div");
promptPanel.className = "prompt-panel";
const promptButton = document.createElement("button");
promptButton.textContent = `prompt mode (seed ${seedFromLocation()})`;
const promptLine = document.createElement("div");
promptLine.className = "prompt-line";
const promptSummary = document.createElement("pre");
promptSummary.className = "prompt-summary";
promptPanel.append(promptButton, promptLine, promptSummary);
root.appendChild(promptPanel);

let session: PromptSession | null = null;

function renderPrompt(): void {
  if (!session) return;
  const current = session.current();
  promptLine.textContent = session.done
    ? "done"
    : current
      ? `draw: ${current}`
      : "";
  promptSummary.textContent = session.summaryLines().join("\n");
}

promptButton.addEventListener("click", () => {
  session = new PromptSession({ seed: seedFromLocation(), onUpdate: renderPrompt });
  session.start();
});

const forwardPrediction = socket.onPrediction;
socket.onPrediction = (msg) => {
  forwardPrediction?.(msg);
  session?.feedPrediction(msg.label);
  renderPrompt();
};

app.gridElement.addEventListener("pointerdown", () => {
  session?.noteTouch();
});
