import { describe, expect, it } from "vitest";

import { ConciergeClient, type FetchLike } from "../src/api.js";
import { DashboardController } from "../src/controller.js";
import { createMockService } from "./mock_service.js";

async function openP1(mock = createMockService()) {
  const controller = new DashboardController(new ConciergeClient("", mock.fetch));
  await controller.openPost("p1");
  return { controller, mock };
}

describe("feedback form contract", () => {
  it("posts a valid FeedbackRecord and surfaces the stored id", async () => {
    const { controller, mock } = await openP1();
    controller.setDraft({ field: "label", proposed: "non-misleading", prior: "misleading" });
    const ack = await controller.submitFeedback();

    expect(ack?.id).toBe("fb-000001");
    expect(mock.feedbackSubmissions).toHaveLength(1);
    expect(mock.feedbackSubmissions[0]).toEqual({
      post_id: "p1",
      field: "label",
      proposed: "non-misleading",
      prior: "misleading",
      session: "dashboard",
    });
    // accepted: draft cleared, id displayed as pending retrain
    expect(controller.data.feedback.draft).toBeNull();
    expect(controller.data.feedback.storedId).toBe("fb-000001");
    expect(controller.data.feedback.validationError).toBeNull();
  });

  it("blocks proposed == prior client-side with no request", async () => {
    const { controller, mock } = await openP1();
    controller.setDraft({ field: "label", proposed: "misleading", prior: "misleading" });
    const ack = await controller.submitFeedback();

    expect(ack).toBeNull();
    expect(mock.callsTo("/feedback")).toHaveLength(0); // never left the client
    expect(controller.data.feedback.validationError).toContain("differ");
    expect(controller.data.feedback.draft).not.toBeNull(); // draft kept for editing
  });

  it("blocks deep-equal entity values too", async () => {
    const { controller, mock } = await openP1();
    controller.setDraft({
      field: "entity",
      proposed: { surface: "ohio", type: "GPE" },
      prior: { surface: "ohio", type: "GPE" },
    });
    await controller.submitFeedback();
    expect(mock.callsTo("/feedback")).toHaveLength(0);
  });

  it("shows a service 422 as an inline error and keeps the draft", async () => {
    const { controller, mock } = await openP1();
    controller.setDraft({ field: "vibe" as never, proposed: "x", prior: "y" });
    const ack = await controller.submitFeedback();

    expect(ack).toBeNull();
    expect(mock.callsTo("/feedback")).toHaveLength(1);
    expect(controller.data.feedback.validationError).toContain("field");
    expect(controller.data.feedback.draft).not.toBeNull();
  });

  it("preserves the draft on network failure for resubmission", async () => {
    const mock = createMockService();
    let failNext = true;
    const flaky: FetchLike = async (input, init) => {
      const url = new URL(input, "http://mock");
      if (url.pathname === "/feedback" && failNext) {
        failNext = false;
        throw new TypeError("connection reset");
      }
      return mock.fetch(input, init);
    };
    const controller = new DashboardController(new ConciergeClient("", flaky));
    await controller.openPost("p1");

    controller.setDraft({ field: "label", proposed: "non-misleading", prior: "misleading" });
    const first = await controller.submitFeedback();
    expect(first).toBeNull();
    expect(controller.data.feedback.networkError).toContain("draft preserved");
    expect(controller.data.feedback.draft).not.toBeNull();

    const second = await controller.submitFeedback(); // resubmit the same draft
    expect(second?.id).toBe("fb-000001");
    expect(controller.data.feedback.storedId).toBe("fb-000001");
  });

  it("topic corrections send the prior topic name", async () => {
    const { controller, mock } = await openP1();
    controller.setDraft({ field: "topic", proposed: "Myths", prior: "Shots" });
    await controller.submitFeedback();
    expect(mock.feedbackSubmissions[0]).toMatchObject({
      field: "topic",
      proposed: "Myths",
      prior: "Shots",
    });
  });
});
