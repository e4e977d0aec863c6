import { describe, expect, it } from "vitest";

import { ApiError, ConciergeClient } from "../src/api.js";
import { createMockService } from "./mock_service.js";

function client(mock = createMockService()) {
  return { api: new ConciergeClient("", mock.fetch), mock };
}

describe("ConciergeClient", () => {
  it("parses health", async () => {
    const { api } = client();
    expect(await api.health()).toEqual({ status: "ok", snapshot_version: 1 });
  });

  it("parses topic stats", async () => {
    const { api } = client();
    const topics = await api.statsTopics();
    expect(topics.total).toBe(7);
    expect(topics.rows[0]?.topic).toBe("Shots");
  });

  it("parses a post with all annotation fields", async () => {
    const { api } = client();
    const post = await api.post("p1");
    expect(post.label).toBe("misleading");
    expect(post.topic?.name).toBe("Shots");
    expect(post.entities?.[0]?.type).toBe("VAC_TYPE");
    expect(post.sentiment?.class).toBe("negative");
  });

  it("surfaces structured errors as ApiError", async () => {
    const { api } = client();
    const failure = await api.post("ghost").catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(404);
    expect(failure.code).toBe("not_found");
  });

  it("rejects shape-invalid payloads", async () => {
    const bad = async () =>
      new Response(JSON.stringify({ status: "ok" }), {
        status: 200,
        headers: { "Content-Type": "application/json" },
      });
    const api = new ConciergeClient("", bad);
    await expect(api.health()).rejects.toThrow();
  });

  it("sends recommendation query parameters", async () => {
    const { api, mock } = client();
    await api.recommendations("p1", 5, "non-misleading", "strict");
    const call = mock.callsTo("/posts/p1/recommendations")[0];
    expect(call?.params).toEqual({ k: "5", target: "non-misleading", relaxation: "strict" });
  });
});
