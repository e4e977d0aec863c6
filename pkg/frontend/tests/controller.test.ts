import { describe, expect, it } from "vitest";

import { ConciergeClient, type FetchLike } from "../src/api.js";
import { DashboardController } from "../src/controller.js";
import { createMockService } from "./mock_service.js";

function makeController(mock = createMockService()) {
  return {
    controller: new DashboardController(new ConciergeClient("", mock.fetch)),
    mock,
  };
}

describe("panoramic view wiring", () => {
  it("loads the topic distribution", async () => {
    const { controller, mock } = makeController();
    await controller.loadPanoramic();
    expect(mock.callsTo("/stats/topics")).toHaveLength(1);
    expect(controller.data.topics.data?.rows[0]?.topic).toBe("Shots");
  });

  it("topic click issues the entity and timeline queries for that topic", async () => {
    const { controller, mock } = makeController();
    await controller.loadPanoramic();
    await controller.selectTopic("Shots");

    const entityCalls = mock.callsTo("/stats/entities");
    const timelineCalls = mock.callsTo("/stats/timeline");
    expect(entityCalls).toHaveLength(1);
    expect(entityCalls[0]?.params).toEqual({ topic: "Shots", n: "50" });
    expect(timelineCalls).toHaveLength(1);
    expect(timelineCalls[0]?.params).toEqual({ topic: "Shots", granularity: "day" });

    expect(controller.data.entities.data?.topic).toBe("Shots");
    expect(controller.data.timeline.data?.buckets.length).toBeGreaterThan(0);
  });

  it("switching topics refetches with the new topic name", async () => {
    const { controller, mock } = makeController();
    await controller.selectTopic("Shots");
    await controller.selectTopic("Myths");
    const topics = mock.callsTo("/stats/entities").map((c) => c.params["topic"]);
    expect(topics).toEqual(["Shots", "Myths"]);
    expect(controller.state.topic).toBe("Myths");
  });

  it("flags the service as unreachable on network failure", async () => {
    const broken: FetchLike = async () => {
      throw new TypeError("connection refused");
    };
    const controller = new DashboardController(new ConciergeClient("", broken));
    await controller.loadPanoramic();
    expect(controller.data.unreachable).toBe(true);
    expect(controller.data.topics.data).toBeNull(); // never shows stale data as fresh
  });
});

describe("tweet-centric view", () => {
  it("opening a post loads annotations and both recommendation panels", async () => {
    const { controller, mock } = makeController();
    await controller.openPost("p1");
    expect(controller.state.view).toBe("tweet-centric");
    expect(controller.data.post.data?.id).toBe("p1");

    const recCalls = mock.callsTo("/posts/p1/recommendations");
    expect(recCalls).toHaveLength(2);
    const targets = new Set(recCalls.map((c) => c.params["target"]));
    expect(targets).toEqual(new Set(["non-misleading", "misleading"]));
    expect(recCalls.every((c) => c.params["k"] === "3")).toBe(true); // default K
  });

  it("K change refetches and the displayed list is prefix-consistent", async () => {
    const { controller, mock } = makeController();
    await controller.openPost("p1");
    const atThree = controller.data.recommendations.data!.items.map((r) => r.post_id);
    expect(atThree).toHaveLength(3);

    await controller.setK(5);
    const lastCall = mock.callsTo("/posts/p1/recommendations").at(-1);
    expect(lastCall?.params["k"]).toBe("5");

    const atFive = controller.data.recommendations.data!.items.map((r) => r.post_id);
    expect(atFive.length).toBeLessThanOrEqual(5);
    expect(atFive.slice(0, atThree.length)).toEqual(atThree); // prefix consistency
  });

  it("shrinking K keeps the shorter prefix", async () => {
    const { controller } = makeController();
    await controller.openPost("p1");
    const atThree = controller.data.recommendations.data!.items.map((r) => r.post_id);
    await controller.setK(1);
    const atOne = controller.data.recommendations.data!.items.map((r) => r.post_id);
    expect(atOne).toEqual(atThree.slice(0, 1));
  });

  it("rejects invalid K without issuing a request", async () => {
    const { controller, mock } = makeController();
    await controller.openPost("p1");
    const before = mock.callsTo("/posts/p1/recommendations").length;
    await controller.setK(0);
    expect(mock.callsTo("/posts/p1/recommendations")).toHaveLength(before);
    expect(controller.data.feedback.validationError).toContain("K");
  });

  it("relaxation toggle refetches with the new mode", async () => {
    const { controller, mock } = makeController();
    await controller.openPost("p1");
    await controller.setRelaxation("strict");
    const lastCall = mock.callsTo("/posts/p1/recommendations").at(-1);
    expect(lastCall?.params["relaxation"]).toBe("strict");
    expect(controller.data.recommendations.data!.items.every((r) => !r.relaxed)).toBe(true);
  });

  it("relaxed recommendations stay flagged for the UI", async () => {
    const { controller } = makeController();
    await controller.openPost("p1");
    await controller.setK(4);
    const flags = controller.data.recommendations.data!.items.map((r) => r.relaxed);
    expect(flags).toEqual([false, false, true, true]); // tiers never interleave
  });

  it("missing posts surface a not-found error", async () => {
    const { controller } = makeController();
    await controller.openPost("ghost");
    expect(controller.data.post.error).toContain("unknown post");
  });
});

describe("stale response handling", () => {
  it("discards a slow response that arrives after a newer request", async () => {
    const mock = createMockService();
    const gates = new Map<string, () => void>();
    const gated: FetchLike = async (input, init) => {
      const url = new URL(input, "http://mock");
      const topic = url.searchParams.get("topic");
      if (url.pathname === "/stats/entities" && topic === "Shots") {
        await new Promise<void>((resolve) => gates.set("shots", resolve));
      }
      return mock.fetch(input, init);
    };
    const controller = new DashboardController(new ConciergeClient("", gated));

    const first = controller.selectTopic("Shots"); // stalls on the gate
    const second = controller.selectTopic("Myths"); // completes immediately
    await second;
    gates.get("shots")?.();
    await first;

    // the slow "Shots" payload must not clobber the newer "Myths" one
    expect(controller.state.topic).toBe("Myths");
    expect(controller.data.entities.data?.topic).toBe("Myths");
  });
});
