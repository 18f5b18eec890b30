import { describe, expect, it } from "vitest";

import { RequestQueue } from "../src/queue.js";

const tick = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

describe("RequestQueue", () => {
  it("runs tasks strictly in enqueue order", async () => {
    const queue = new RequestQueue();
    const started: number[] = [];
    const finished: number[] = [];
    const tasks = [30, 0, 10].map((delay, i) =>
      queue.enqueue(async () => {
        started.push(i);
        await new Promise((resolve) => setTimeout(resolve, delay));
        finished.push(i);
        return i;
      }),
    );
    expect(await Promise.all(tasks)).toEqual([0, 1, 2]);
    // Even though task 0 is the slowest, nothing overlaps it.
    expect(started).toEqual([0, 1, 2]);
    expect(finished).toEqual([0, 1, 2]);
  });

  it("a rejected task does not block later ones", async () => {
    const queue = new RequestQueue();
    const boom = queue.enqueue(async () => {
      throw new Error("boom");
    });
    const after = queue.enqueue(async () => "ok");
    await expect(boom).rejects.toThrow("boom");
    expect(await after).toBe("ok");
  });

  it("whenIdle resolves after everything enqueued has settled", async () => {
    const queue = new RequestQueue();
    let done = 0;
    void queue.enqueue(async () => {
      await tick();
      done += 1;
    });
    void queue.enqueue(async () => {
      done += 1;
    });
    expect(queue.pending).toBe(2);
    await queue.whenIdle();
    expect(done).toBe(2);
    expect(queue.pending).toBe(0);
  });
});
