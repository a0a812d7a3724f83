/**
 * Client-side mirror of the annotation gating rules, purely
 * presentational. The service re-normalizes every submission, so this
 * only drives which controls are enabled; a tampered client cannot store
 * an invalid record.
 */

import type { Responses, Scheme } from "./types.js";

export const NOT_APPLICABLE = "NA";
export const GATE_TRIGGER = "no";

/** Ids of items forced to "not applicable" by an earlier gate answered no. */
export function gatedItemIds(scheme: Scheme, responses: Responses): Set<string> {
  const gated = new Set<string>();
  let blanked = false;
  for (const item of scheme.items) {
    if (blanked) {
      gated.add(item.id);
      continue;
    }
    if (item.is_gate && responses[item.id] === GATE_TRIGGER) {
      blanked = true;
    }
  }
  return gated;
}

/** The record as the server will store it: answers plus forced NAs. */
export function normalizeResponses(scheme: Scheme, responses: Responses): Responses {
  const gated = gatedItemIds(scheme, responses);
  const out: Responses = {};
  for (const item of scheme.items) {
    out[item.id] = gated.has(item.id) ? NOT_APPLICABLE : responses[item.id] ?? NOT_APPLICABLE;
  }
  return out;
}

/** Items still requiring an answer before the form may submit. */
export function missingItemIds(scheme: Scheme, responses: Responses): string[] {
  const gated = gatedItemIds(scheme, responses);
  return scheme.items
    .filter((item) => !gated.has(item.id) && responses[item.id] === undefined)
    .map((item) => item.id);
}
