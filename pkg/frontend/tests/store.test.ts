import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionStore } from "../src/store.js";
import { FakeService } from "./fakeService.js";

async function openStore(): Promise<{ fake: FakeService; store: SessionStore }> {
  const fake = new FakeService();
  const store = new SessionStore(new ApiClient("http://fake", fake.fetch));
  await store.open("fake_lamp");
  return { fake, store };
}

describe("SessionStore", () => {
  it("commit applies the service response", async () => {
    const { store } = await openStore();
    const outcome = await store.commitParam("height", 0.4);
    expect(outcome.kind).toBe("committed");
    expect(store.state.values["height"]).toBe(0.4);
    expect(store.state.mesh_version).toBe(2);
  });

  it("snap-back keeps the prior committed value and raises a notice", async () => {
    const { store } = await openStore();
    const events: string[] = [];
    store.onSnapBack((e) => events.push(`${e.parameter}:${e.restored}`));
    const outcome = await store.commitParam("height", 0.9);
    expect(outcome.kind).toBe("snapped_back");
    expect(store.state.values["height"]).toBe(0.35);
    expect(store.state.mesh_version).toBe(1);
    expect(events).toEqual(["height:0.35"]);
    expect(store.notices.at(-1)?.level).toBe("error");
    expect(store.notices.at(-1)?.message).toContain("height out of range");
  });

  it("a stale expected_version yields a 409 and triggers a refetch", async () => {
    const { fake, store } = await openStore();
    // Another client commits behind our back, bumping the version.
    fake.session.committed = { height: 0.2, diameter: 0.2 };
    fake.session.meshVersion = 7;
    const outcome = await store.commitParam("height", 0.4, { guard: true });
    expect(outcome.kind).toBe("conflict");
    // The store refetched the authoritative state instead of retrying.
    expect(store.state.values["height"]).toBe(0.2);
    expect(store.state.mesh_version).toBe(7);
    expect(store.notices.at(-1)?.message).toContain("refreshed");
  });

  it("after quiesce the displayed committed values equal GET /sessions", async () => {
    const { fake, store } = await openStore();
    void store.previewParam("height", 0.42);
    void store.commitParam("height", 0.45);
    void store.commitParam("diameter", 0.5);
    const settled = await store.quiesce();
    const authoritative = JSON.parse(
      await (await fake.fetch("http://fake/sessions/fake-session")).text(),
    );
    expect(settled.values).toEqual(authoritative.values);
    expect(store.state.values).toEqual(authoritative.values);
    expect(store.state.previewing).toBe(false);
  });

  it("mutations reach the service in enqueue order", async () => {
    const { fake, store } = await openStore();
    void store.previewParam("height", 0.2);
    void store.previewParam("height", 0.3);
    void store.commitParam("height", 0.4);
    await store.queue.whenIdle();
    const patches = fake.log
      .filter((r) => r.method === "PATCH")
      .map((r) => [(r.body as any).mode, (r.body as any).value]);
    expect(patches).toEqual([
      ["preview", 0.2],
      ["preview", 0.3],
      ["commit", 0.4],
    ]);
  });
});
