import { describe, expect, it } from "vitest";

import { hasPendingMutations, optimistic } from "../src/optimistic.js";

describe("optimistic", () => {
  it("applies immediately and keeps the change on success", async () => {
    let value = "pending";
    await optimistic({
      apply: () => {
        const before = value;
        value = "accepted";
        return before;
      },
      remote: () => Promise.resolve(),
      revert: (before) => {
        value = before;
      },
    });
    expect(value).toBe("accepted");
  });

  it("reverts to the snapshot and reports the error on failure", async () => {
    let value = "pending";
    let seen: Error | undefined;
    await optimistic({
      apply: () => {
        const before = value;
        value = "accepted";
        return before;
      },
      remote: () => Promise.reject(new Error("409 conflict")),
      revert: (before) => {
        value = before;
      },
      onError: (error) => {
        seen = error;
      },
    });
    expect(value).toBe("pending");
    expect(seen?.message).toContain("409");
  });

  it("tracks pending mutations while in flight", async () => {
    let release: () => void = () => {};
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const done = optimistic({
      apply: () => null,
      remote: () => gate,
      revert: () => {},
    });
    expect(hasPendingMutations()).toBe(true);
    release();
    await done;
    expect(hasPendingMutations()).toBe(false);
  });
});
