import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DRAG_POLL_MS, MeshPoller } from "../src/meshPoller.js";
import { SessionStore } from "../src/store.js";
import { FakeService } from "./fakeService.js";
import type { MeshJson } from "../src/types.js";

describe("MeshPoller", () => {
  it("fetches once, then honours 304 until the version moves", async () => {
    const fake = new FakeService();
    const api = new ApiClient("http://fake", fake.fetch);
    const store = new SessionStore(api);
    await store.open("fake_lamp");

    const meshes: MeshJson[] = [];
    const poller = new MeshPoller(api, "fake-session", (m) => meshes.push(m));

    expect(await poller.tick()).toBe(true);
    expect(poller.version).toBe(1);
    expect(await poller.tick()).toBe(false); // 304: nothing changed
    expect(meshes.length).toBe(1);

    await store.commitParam("height", 0.42);
    expect(await poller.tick()).toBe(true);
    expect(poller.version).toBe(2);
    expect(meshes.length).toBe(2);
    // The refreshed mesh reflects the committed height.
    expect(meshes[1]!.vertices[2]![1]).toBe(0.42);
  });

  it("never overlaps requests and polls fast while dragging", async () => {
    const fake = new FakeService();
    const api = new ApiClient("http://fake", fake.fetch);
    const poller = new MeshPoller(api, "fake-session", () => undefined);

    let release: () => void = () => undefined;
    fake.gate = () =>
      new Promise((resolve) => {
        release = resolve;
      });
    const first = poller.tick();
    const second = poller.tick(); // rejected: one already in flight
    expect(await second).toBe(false);
    fake.gate = null;
    release();
    expect(await first).toBe(true);

    expect(DRAG_POLL_MS).toBe(100); // 10 Hz during drags
  });
});
