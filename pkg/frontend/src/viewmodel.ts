/** Pure view computation: every render value derives from the latest
 * snapshot (plus the clock for blink phase). The UI never predicts engine
 * transitions; highlights always equal the snapshot's indices. */

import type { RectJson, Snapshot } from "./protocol.js";

/** Four distinct hues at 35% opacity for the quadrant overlays. */
export const QUADRANT_COLORS = [
  "rgba(66, 133, 244, 0.35)", // TL blue
  "rgba(219, 68, 55, 0.35)", // TR red
  "rgba(244, 180, 0, 0.35)", // BL amber
  "rgba(15, 157, 88, 0.35)", // BR green
] as const;

export const BLINK_PERIOD_MS = 500;

/** Same split the engine uses: ceiling for top/left, floor for the rest;
 * a 1px dimension collapses both halves onto the same row/column. */
export function quadrantRect(rect: RectJson, quadrant: number): RectJson {
  const leftW = Math.ceil(rect.w / 2);
  const topH = Math.ceil(rect.h / 2);
  const rightW = rect.w - leftW || 1;
  const bottomH = rect.h - topH || 1;
  const rightX = rect.w - leftW ? rect.x + leftW : rect.x;
  const bottomY = rect.h - topH ? rect.y + topH : rect.y;
  switch (quadrant) {
    case 0:
      return { x: rect.x, y: rect.y, w: leftW, h: topH };
    case 1:
      return { x: rightX, y: rect.y, w: rightW, h: topH };
    case 2:
      return { x: rect.x, y: bottomY, w: leftW, h: bottomH };
    default:
      return { x: rightX, y: bottomY, w: rightW, h: bottomH };
  }
}

export interface QuadrantView {
  rect: RectJson;
  color: string;
  emphasized: boolean;
}

export interface PointerView {
  quadrants: QuadrantView[];
  /** Marker shown once no further subdivision is possible. */
  targetMarker: { x: number; y: number } | null;
  /** Rect that blinks while a click is pending (null otherwise). */
  blinkRect: RectJson | null;
  pendingDeadline: number | null;
}

export interface KeyboardView {
  labels: { text: string; highlighted: boolean; disabled: boolean }[];
  breadcrumb: string;
  prefix: string;
}

export interface ViewModel {
  mode: "keyboard" | "pointer";
  pointer: PointerView;
  keyboard: KeyboardView;
  focusedApp: string;
  textBuffer: string;
  icons: Record<string, RectJson>;
  screen: { w: number; h: number };
}

export function buildView(snapshot: Snapshot): ViewModel {
  const pointer = snapshot.pointer;
  const atMaxDepth = pointer.depth >= pointer.max_depth;
  const pending = pointer.phase === "pending_click";
  const center = {
    x: pointer.rect.x + Math.floor(pointer.rect.w / 2),
    y: pointer.rect.y + Math.floor(pointer.rect.h / 2),
  };
  const quadrants: QuadrantView[] = [];
  if (snapshot.mode === "pointer" && !atMaxDepth) {
    for (let q = 0; q < 4; q += 1) {
      quadrants.push({
        rect: quadrantRect(pointer.rect, q),
        color: QUADRANT_COLORS[q],
        emphasized: q === pointer.highlighted,
      });
    }
  }
  return {
    mode: snapshot.mode,
    pointer: {
      quadrants,
      targetMarker: snapshot.mode === "pointer" && atMaxDepth ? center : null,
      blinkRect: pending ? pointer.rect : null,
      pendingDeadline: pointer.deadline_ms,
    },
    keyboard: {
      labels: snapshot.keyboard.labels.map((text, index) => ({
        text,
        highlighted: index === snapshot.keyboard.highlighted,
        disabled: snapshot.keyboard.disabled.includes(index),
      })),
      breadcrumb: snapshot.keyboard.breadcrumb.join(" / "),
      prefix: snapshot.prefix,
    },
    focusedApp: snapshot.desktop.focused_app,
    textBuffer: snapshot.desktop.text_buffer,
    icons: snapshot.desktop.icons,
    screen: snapshot.desktop.screen,
  };
}

/** Blink is on/off in fixed periods and stops once the deadline passes. */
export function blinkOn(deadlineMs: number | null, nowMs: number): boolean {
  if (deadlineMs === null || nowMs >= deadlineMs) return false;
  const remaining = deadlineMs - nowMs;
  return Math.floor(remaining / BLINK_PERIOD_MS) % 2 === 0;
}

/** Snapshot ordering guard: render only frames newer than the last one. */
export function shouldRender(lastSeq: number, snapshot: Snapshot): boolean {
  return snapshot.seq > lastSeq;
}
