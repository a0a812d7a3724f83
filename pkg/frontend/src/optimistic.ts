/**
 * Optimistic mutation helper: apply locally, sync in the background,
 * revert on failure. A 409 from the server means someone else decided
 * first; the caller gets the error after the revert and can prompt for a
 * refresh.
 */

const pending = new Set<string>();
let counter = 0;

export interface OptimisticOptions<T> {
  /** Unique key for tracking; generated when omitted. */
  key?: string;
  /** Apply the change immediately; returns a snapshot for revert. */
  apply: () => T;
  /** The actual remote call. */
  remote: () => Promise<void>;
  /** Undo the local change after a remote failure. */
  revert: (snapshot: T) => void;
  /** Called with the error after revert. */
  onError?: (error: Error) => void;
}

export function optimistic<T>(options: OptimisticOptions<T>): Promise<void> {
  const key = options.key ?? `mutation-${++counter}`;
  const snapshot = options.apply();
  pending.add(key);
  return options
    .remote()
    .catch((error: Error) => {
      options.revert(snapshot);
      options.onError?.(error);
    })
    .finally(() => {
      pending.delete(key);
    });
}

export function hasPendingMutations(): boolean {
  return pending.size > 0;
}
