/** Wire types for the session gateway: one JSON object per text frame. */

export type ActionName = "scroll" | "zoom_in" | "zoom_out";

export const ACTIONS: readonly ActionName[] = ["scroll", "zoom_in", "zoom_out"];

export interface RectJson {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface KeyboardSnapshot {
  labels: string[];
  highlighted: number;
  breadcrumb: string[];
  disabled: number[];
}

export interface PointerSnapshot {
  rect: RectJson;
  highlighted: number;
  depth: number;
  max_depth: number;
  phase: "navigating" | "pending_click";
  deadline_ms: number | null;
}

export interface DesktopSnapshot {
  screen: { w: number; h: number };
  focused_app: string;
  icons: Record<string, RectJson>;
  text_buffer: string;
}

export interface Snapshot {
  type: "snapshot";
  seq: number;
  mode: "keyboard" | "pointer";
  keyboard: KeyboardSnapshot;
  pointer: PointerSnapshot;
  prefix: string;
  sounds: Record<string, string>;
  desktop: DesktopSnapshot;
}

export interface OutputFrame {
  type: "output";
  event: Record<string, unknown>;
}

export interface CueFrame {
  type: "cue";
  event: string;
}

export interface ErrorFrame {
  type: "error";
  message: string;
  payload: unknown;
}

export type ServerFrame = Snapshot | OutputFrame | CueFrame | ErrorFrame;

export interface ActionMessage {
  type: "action";
  action: ActionName;
}

export function actionMessage(action: ActionName): string {
  return JSON.stringify({ type: "action", action });
}

/** Parse one server frame; returns null for anything malformed. */
export function parseFrame(raw: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const frame = data as { type?: unknown };
  switch (frame.type) {
    case "snapshot": {
      const snap = data as Snapshot;
      if (
        typeof snap.seq !== "number" ||
        (snap.mode !== "keyboard" && snap.mode !== "pointer") ||
        typeof snap.keyboard !== "object" ||
        typeof snap.pointer !== "object"
      ) {
        return null;
      }
      return snap;
    }
    case "output":
      return data as OutputFrame;
    case "cue":
      return data as CueFrame;
    case "error":
      return data as ErrorFrame;
    default:
      return null;
  }
}
