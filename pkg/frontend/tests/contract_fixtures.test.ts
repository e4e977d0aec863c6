/**
 * Cross-implementation contract check: payloads captured from the real
 * backend (tests/fixtures/real_payloads.json, regenerated alongside backend
 * changes) must satisfy the client's schemas exactly.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import {
  apiErrorSchema,
  entityCloudSchema,
  feedbackAckSchema,
  healthSchema,
  postSchema,
  postsPageSchema,
  recommendationsResponseSchema,
  timelineSchema,
  topicsResponseSchema,
} from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));
const payloads = JSON.parse(
  readFileSync(join(here, "fixtures", "real_payloads.json"), "utf-8"),
) as Record<string, unknown>;

describe("real backend payloads satisfy the client schemas", () => {
  const cases = [
    ["health", healthSchema],
    ["topics", topicsResponseSchema],
    ["entities", entityCloudSchema],
    ["timeline", timelineSchema],
    ["posts_page", postsPageSchema],
    ["post", postSchema],
    ["recommendations", recommendationsResponseSchema],
    ["feedback_ack", feedbackAckSchema],
    ["error", apiErrorSchema],
  ] as const;

  it.each(cases.map(([name]) => name))("%s", (name) => {
    const schema = cases.find(([n]) => n === name)![1];
    const result = schema.safeParse(payloads[name]);
    if (!result.success) {
      throw new Error(JSON.stringify(result.error.issues, null, 2));
    }
    expect(result.success).toBe(true);
  });

  it("recommendation items carry the tier flag the UI renders", () => {
    const recs = recommendationsResponseSchema.parse(payloads["recommendations"]);
    expect(recs.k).toBe(3);
    for (const item of recs.items) {
      expect(typeof item.relaxed).toBe("boolean");
    }
  });
});
