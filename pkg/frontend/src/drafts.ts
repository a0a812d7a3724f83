/**
 * Local draft persistence so no annotation state is lost when navigating
 * within a session. Values entered below a gate survive the gate flipping
 * to "no" and back; only submission clears the draft.
 */

import type { Responses } from "./types.js";

const PREFIX = "defquest-draft:";

function storage(): Storage | null {
  try {
    return typeof localStorage === "undefined" ? null : localStorage;
  } catch {
    return null;
  }
}

export function saveDraft(questionId: string, responses: Responses): void {
  storage()?.setItem(PREFIX + questionId, JSON.stringify(responses));
}

export function loadDraft(questionId: string): Responses | null {
  const raw = storage()?.getItem(PREFIX + questionId);
  if (!raw) return null;
  try {
    return JSON.parse(raw) as Responses;
  } catch {
    return null;
  }
}

export function clearDraft(questionId: string): void {
  storage()?.removeItem(PREFIX + questionId);
}
