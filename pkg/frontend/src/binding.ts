/** Physical-input bindings: which key drives which of the three actions.
 *
 * Stands in for a dedicated three-signal device so anyone can operate the
 * system from a regular keyboard. Keys are `KeyboardEvent.key` values.
 */

import type { ActionName } from "./protocol.js";
import { ACTIONS } from "./protocol.js";

export type InputBinding = Record<string, ActionName>;

export const DEFAULT_BINDING: InputBinding = {
  ArrowRight: "scroll",
  ArrowDown: "zoom_in",
  ArrowUp: "zoom_out",
};

/** Empty list means the binding is usable. */
export function bindingProblems(binding: InputBinding): string[] {
  const problems: string[] = [];
  const bound = new Set(Object.values(binding));
  for (const action of ACTIONS) {
    if (!bound.has(action)) problems.push(`no key bound to ${action}`);
  }
  // object keys are unique by construction; report unknown actions instead
  for (const [key, action] of Object.entries(binding)) {
    if (!ACTIONS.includes(action)) problems.push(`${key} bound to unknown ${action}`);
  }
  return problems;
}

export function actionForKey(binding: InputBinding, key: string): ActionName | null {
  return binding[key] ?? null;
}

const STORAGE_KEY = "mindsim.binding";

export function loadBinding(storage: Pick<Storage, "getItem">): InputBinding {
  try {
    const raw = storage.getItem(STORAGE_KEY);
    if (!raw) return { ...DEFAULT_BINDING };
    const parsed = JSON.parse(raw) as InputBinding;
    return bindingProblems(parsed).length === 0 ? parsed : { ...DEFAULT_BINDING };
  } catch {
    return { ...DEFAULT_BINDING };
  }
}

export function saveBinding(storage: Pick<Storage, "setItem">, binding: InputBinding): void {
  storage.setItem(STORAGE_KEY, JSON.stringify(binding));
}
