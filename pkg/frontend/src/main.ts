/** Browser entry point: renders the mock desktop, quadrant overlays and
 * keyboard panel from gateway snapshots, and maps physical keys to the
 * three actions. All state lives in the last snapshot. */

import { GatewayClient } from "./client.js";
import { CuePlayer, audioPlayer } from "./cues.js";
import { DEFAULT_BINDING, actionForKey, loadBinding, saveBinding } from "./binding.js";
import type { InputBinding } from "./binding.js";
import type { ActionName, Snapshot } from "./protocol.js";
import { blinkOn, buildView } from "./viewmodel.js";
import type { ViewModel } from "./viewmodel.js";

function serverUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("server");
  return fromQuery ?? localStorage.getItem("mindsim.server") ?? "ws://127.0.0.1:7070";
}

const canvas = document.getElementById("desktop") as HTMLCanvasElement;
const keyboardPanel = document.getElementById("keyboard") as HTMLDivElement;
const breadcrumbEl = document.getElementById("breadcrumb") as HTMLDivElement;
const bufferEl = document.getElementById("buffer") as HTMLPreElement;
const bannerEl = document.getElementById("banner") as HTMLDivElement;
const statusEl = document.getElementById("status") as HTMLSpanElement;
const echoEl = document.getElementById("echo") as HTMLSpanElement;
const muteBox = document.getElementById("mute") as HTMLInputElement;

let binding: InputBinding = loadBinding(localStorage);
let view: ViewModel | null = null;
let snapshot: Snapshot | null = null;
let pendingSince = 0; // local ms when the pending snapshot arrived

const cues = new CuePlayer(audioPlayer());
muteBox.addEventListener("change", () => {
  cues.muted = muteBox.checked;
});

const client = new GatewayClient(
  serverUrl(),
  {
    onSnapshot(next) {
      snapshot = next;
      view = buildView(next);
      if (next.pointer.phase === "pending_click") pendingSince = performance.now();
      render();
    },
    onFrame(frame) {
      if (frame.type === "cue" && snapshot) cues.trigger(frame.event, snapshot.sounds);
      if (frame.type === "error") console.warn("gateway error:", frame.message);
    },
    onStatus(connected) {
      statusEl.textContent = connected ? "connected" : "disconnected";
      statusEl.className = connected ? "ok" : "bad";
      render();
    },
  },
  (url) => new WebSocket(url),
);
client.connect();

window.addEventListener("keydown", (event) => {
  const action = actionForKey(binding, event.key);
  if (!action) return;
  event.preventDefault();
  client.sendAction(action);
  echoEl.textContent = action; // cleared when the next snapshot lands
  render();
});

function scale(): number {
  if (!view) return 1;
  return Math.min(canvas.width / view.screen.w, canvas.height / view.screen.h);
}

function render(): void {
  bannerEl.hidden = !client.offlineBanner;
  if (!view || !snapshot) return;
  if (client.echo === null) echoEl.textContent = "";
  drawDesktop();
  drawKeyboard();
}

function drawDesktop(): void {
  if (!view) return;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const k = scale();
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#1d2732";
  ctx.fillRect(0, 0, view.screen.w * k, view.screen.h * k);

  for (const [name, rect] of Object.entries(view.icons)) {
    ctx.fillStyle = name === view.focusedApp ? "#3c5a78" : "#2b3e52";
    ctx.fillRect(rect.x * k, rect.y * k, rect.w * k, rect.h * k);
    ctx.fillStyle = "#dfe7ef";
    ctx.font = "12px sans-serif";
    ctx.fillText(name, rect.x * k + 4, (rect.y + rect.h) * k - 6);
  }

  for (const quadrant of view.pointer.quadrants) {
    const r = quadrant.rect;
    ctx.fillStyle = quadrant.color;
    ctx.fillRect(r.x * k, r.y * k, r.w * k, r.h * k);
    if (quadrant.emphasized) {
      ctx.strokeStyle = "#ffffff";
      ctx.lineWidth = 3;
      ctx.strokeRect(r.x * k + 1, r.y * k + 1, r.w * k - 2, r.h * k - 2);
    }
  }

  const marker = view.pointer.targetMarker;
  if (marker) {
    const blink = view.pointer.blinkRect;
    const deadline = view.pointer.pendingDeadline;
    let visible = true;
    if (blink && deadline !== null) {
      const engineNow = deadline - 4000 + (performance.now() - pendingSince);
      visible = blinkOn(deadline, engineNow);
      if (visible) {
        ctx.fillStyle = "rgba(255, 255, 255, 0.30)";
        ctx.fillRect(blink.x * k, blink.y * k, Math.max(blink.w * k, 2), Math.max(blink.h * k, 2));
      }
      requestAnimationFrame(render);
    }
    ctx.strokeStyle = "#ff5252";
    ctx.lineWidth = 2;
    const size = 8;
    ctx.beginPath();
    ctx.moveTo(marker.x * k - size, marker.y * k);
    ctx.lineTo(marker.x * k + size, marker.y * k);
    ctx.moveTo(marker.x * k, marker.y * k - size);
    ctx.lineTo(marker.x * k, marker.y * k + size);
    ctx.stroke();
  }

  bufferEl.textContent = `${view.focusedApp}> ${view.textBuffer}`;
}

function drawKeyboard(): void {
  if (!view) return;
  keyboardPanel.hidden = view.mode !== "keyboard";
  breadcrumbEl.textContent =
    view.mode === "keyboard"
      ? `${view.keyboard.breadcrumb || "(root)"}  |  word: ${view.keyboard.prefix || "(none)"}`
      : "pointer mode";
  if (view.mode !== "keyboard") return;
  keyboardPanel.replaceChildren(
    ...view.keyboard.labels.map((label) => {
      const cell = document.createElement("div");
      cell.className = "key";
      if (label.highlighted) cell.classList.add("highlighted");
      if (label.disabled) cell.classList.add("disabled");
      cell.textContent = label.text;
      return cell;
    }),
  );
}

// minimal binding editor: click a slot, press the new key
for (const el of document.querySelectorAll<HTMLButtonElement>("button[data-action]")) {
  const action = el.dataset.action as ActionName;
  const current = Object.entries(binding).find(([, a]) => a === action)?.[0];
  el.textContent = `${action}: ${current ?? "unset"}`;
  el.addEventListener("click", () => {
    el.textContent = `${action}: press a key…`;
    const capture = (event: KeyboardEvent) => {
      event.preventDefault();
      window.removeEventListener("keydown", capture, true);
      const next: InputBinding = Object.fromEntries(
        Object.entries(binding).filter(([, a]) => a !== action),
      ) as InputBinding;
      next[event.key] = action;
      binding = next;
      saveBinding(localStorage, binding);
      localStorage.setItem("mindsim.server", serverUrl());
      el.textContent = `${action}: ${event.key}`;
    };
    window.addEventListener("keydown", capture, true);
  });
}

export { DEFAULT_BINDING };
