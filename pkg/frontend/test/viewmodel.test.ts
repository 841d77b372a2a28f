import { describe, expect, it } from "vitest";

import type { Snapshot } from "../src/protocol.js";
import {
  BLINK_PERIOD_MS,
  QUADRANT_COLORS,
  blinkOn,
  buildView,
  quadrantRect,
  shouldRender,
} from "../src/viewmodel.js";

function snapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    type: "snapshot",
    seq: 1,
    mode: "pointer",
    keyboard: { labels: ["letters", "numbers"], highlighted: 0, breadcrumb: [], disabled: [] },
    pointer: {
      rect: { x: 0, y: 0, w: 1920, h: 1080 },
      highlighted: 0,
      depth: 0,
      max_depth: 7,
      phase: "navigating",
      deadline_ms: null,
    },
    prefix: "",
    sounds: {},
    desktop: { screen: { w: 1920, h: 1080 }, focused_app: "desktop", icons: {}, text_buffer: "" },
    ...overrides,
  };
}

describe("quadrantRect", () => {
  it("splits even rects in four equal parts", () => {
    const rect = { x: 0, y: 0, w: 1920, h: 1080 };
    expect(quadrantRect(rect, 0)).toEqual({ x: 0, y: 0, w: 960, h: 540 });
    expect(quadrantRect(rect, 3)).toEqual({ x: 960, y: 540, w: 960, h: 540 });
  });

  it("gives the ceiling to top/left on odd sizes, like the engine", () => {
    const rect = { x: 0, y: 0, w: 5, h: 5 };
    expect(quadrantRect(rect, 0)).toEqual({ x: 0, y: 0, w: 3, h: 3 });
    expect(quadrantRect(rect, 3)).toEqual({ x: 3, y: 3, w: 2, h: 2 });
  });

  it("collapses a 1px dimension onto the same column", () => {
    const rect = { x: 10, y: 0, w: 1, h: 8 };
    expect(quadrantRect(rect, 0)).toEqual({ x: 10, y: 0, w: 1, h: 4 });
    expect(quadrantRect(rect, 1)).toEqual({ x: 10, y: 0, w: 1, h: 4 });
  });

  it("partitions exactly: areas sum to the whole", () => {
    for (const [w, h] of [
      [7, 9],
      [1920, 1080],
      [3, 2],
      [101, 55],
    ]) {
      let area = 0;
      for (let q = 0; q < 4; q += 1) {
        const r = quadrantRect({ x: 0, y: 0, w, h }, q);
        area += r.w * r.h;
      }
      expect(area).toBe(w * h);
    }
  });
});

describe("buildView", () => {
  it("emphasizes exactly the snapshot's highlighted quadrant", () => {
    const view = buildView(snapshot({ pointer: { ...snapshot().pointer, highlighted: 2 } }));
    expect(view.pointer.quadrants).toHaveLength(4);
    expect(view.pointer.quadrants.map((q) => q.emphasized)).toEqual([false, false, true, false]);
    expect(view.pointer.quadrants.map((q) => q.color)).toEqual([...QUADRANT_COLORS]);
  });

  it("initial pointer state shows four full-screen quadrants, top-left emphasized", () => {
    const view = buildView(snapshot());
    expect(view.pointer.quadrants[0]).toEqual({
      rect: { x: 0, y: 0, w: 960, h: 540 },
      color: QUADRANT_COLORS[0],
      emphasized: true,
    });
  });

  it("shows the target marker at max depth instead of quadrants", () => {
    const base = snapshot();
    const view = buildView(
      snapshot({
        pointer: {
          ...base.pointer,
          rect: { x: 0, y: 0, w: 15, h: 9 },
          depth: 7,
        },
      }),
    );
    expect(view.pointer.quadrants).toHaveLength(0);
    expect(view.pointer.targetMarker).toEqual({ x: 7, y: 4 });
  });

  it("activates the blink rect only while a click is pending", () => {
    const base = snapshot();
    const pending = buildView(
      snapshot({
        pointer: {
          ...base.pointer,
          rect: { x: 30, y: 40, w: 15, h: 9 },
          depth: 7,
          phase: "pending_click",
          deadline_ms: 9000,
        },
      }),
    );
    expect(pending.pointer.blinkRect).toEqual({ x: 30, y: 40, w: 15, h: 9 });
    expect(pending.pointer.pendingDeadline).toBe(9000);
    expect(buildView(snapshot()).pointer.blinkRect).toBeNull();
  });

  it("mirrors keyboard labels, highlight and disabled slots verbatim", () => {
    const view = buildView(
      snapshot({
        mode: "keyboard",
        keyboard: {
          labels: ["this", "think", "word 3", "word 4", "word 5", "word 6"],
          highlighted: 1,
          breadcrumb: ["shortcuts", "predict"],
          disabled: [2, 3, 4, 5],
        },
        prefix: "thi",
      }),
    );
    expect(view.keyboard.labels.map((l) => l.highlighted)).toEqual([
      false,
      true,
      false,
      false,
      false,
      false,
    ]);
    expect(view.keyboard.labels.filter((l) => l.disabled)).toHaveLength(4);
    expect(view.keyboard.breadcrumb).toBe("shortcuts / predict");
    expect(view.keyboard.prefix).toBe("thi");
    expect(view.pointer.quadrants).toHaveLength(0); // keyboard mode: no overlay
  });

  it("is a pure function of the snapshot", () => {
    const frame = snapshot({ seq: 7 });
    expect(buildView(frame)).toEqual(buildView(frame));
  });
});

describe("blinkOn", () => {
  it("toggles per period and stops at the deadline", () => {
    const deadline = 4000;
    expect(blinkOn(deadline, 0)).toBe(true);
    expect(blinkOn(deadline, BLINK_PERIOD_MS)).toBe(false);
    expect(blinkOn(deadline, 2 * BLINK_PERIOD_MS)).toBe(true);
    expect(blinkOn(deadline, deadline)).toBe(false);
    expect(blinkOn(deadline, deadline + 100)).toBe(false);
    expect(blinkOn(null, 0)).toBe(false);
  });
});

describe("shouldRender", () => {
  it("drops stale sequence numbers", () => {
    expect(shouldRender(5, snapshot({ seq: 6 }))).toBe(true);
    expect(shouldRender(5, snapshot({ seq: 5 }))).toBe(false);
    expect(shouldRender(5, snapshot({ seq: 4 }))).toBe(false);
  });
});
