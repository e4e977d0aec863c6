/**
 * Typed client for the concierge HTTP API.
 *
 * Every response is validated with zod before it reaches the UI, so the
 * dashboard only ever renders numbers the service actually sent. The fetch
 * implementation is injectable; tests drive the client against a mock
 * service.
 */

import { z } from "zod";

export const topicRowSchema = z.object({
  topic: z.string(),
  misleading: z.number().int().nonnegative(),
  non_misleading: z.number().int().nonnegative(),
  unlabeled: z.number().int().nonnegative(),
  total: z.number().int().nonnegative(),
  percentage: z.number(),
});

export const topicsResponseSchema = z.object({
  total: z.number().int().nonnegative(),
  rows: z.array(topicRowSchema),
  report: z.array(
    z.object({ topic: z.string(), count: z.number().int(), percentage: z.number() }),
  ),
});

export const entityCloudEntrySchema = z.object({
  surface: z.string(),
  type: z.string(),
  count: z.number().int().positive(),
});

export const entityCloudSchema = z.object({
  topic: z.string().nullable(),
  misleading: z.array(entityCloudEntrySchema),
  non_misleading: z.array(entityCloudEntrySchema),
});

export const timelineSchema = z.object({
  granularity: z.enum(["day", "week", "month"]),
  buckets: z.array(
    z.object({
      start: z.string(),
      misleading: z.number().int().nonnegative(),
      non_misleading: z.number().int().nonnegative(),
      unlabeled: z.number().int().nonnegative(),
    }),
  ),
});

export const postSchema = z.object({
  id: z.string(),
  text: z.string(),
  timestamp: z.string(),
  source: z.string(),
  label: z.enum(["misleading", "non-misleading"]).nullable(),
  label_confidence: z.number().nullable(),
  label_source: z.string().nullable(),
  topic: z
    .object({
      name: z.string(),
      matched_terms: z.array(z.string()),
      rescue: z.boolean(),
    })
    .nullable(),
  entities: z
    .array(
      z.object({
        surface: z.string(),
        start: z.number().int(),
        end: z.number().int(),
        type: z.string(),
        method: z.string(),
        score: z.number(),
      }),
    )
    .nullable(),
  sentiment: z
    .object({
      compound: z.number(),
      pos: z.number(),
      neu: z.number(),
      neg: z.number(),
      class: z.enum(["positive", "negative", "neutral"]),
    })
    .nullable(),
  vector_id: z.string().nullable(),
  versions: z.record(z.string()),
});

export const postsPageSchema = z.object({
  total: z.number().int().nonnegative(),
  page: z.number().int().positive(),
  page_size: z.number().int().positive(),
  items: z.array(postSchema),
});

export const recommendationSchema = z.object({
  post_id: z.string(),
  similarity: z.number(),
  matched_criteria: z.object({
    topic: z.boolean(),
    entities: z.array(z.tuple([z.string(), z.string()])),
    sentiment: z.boolean(),
  }),
  relaxed: z.boolean(),
});

export const recommendationsResponseSchema = z.object({
  source_id: z.string(),
  k: z.number().int().positive(),
  target: z.enum(["misleading", "non-misleading"]),
  relaxation: z.enum(["strict", "entity-drop", "sentiment-drop"]),
  items: z.array(recommendationSchema),
});

export const feedbackAckSchema = z.object({
  id: z.string(),
  seq: z.number().int().positive(),
  submitted_at: z.string(),
});

export const healthSchema = z.object({
  status: z.string(),
  snapshot_version: z.number().int(),
});

export const apiErrorSchema = z.object({
  code: z.string(),
  message: z.string(),
  detail: z.unknown().nullable().optional(),
});

export type TopicRow = z.infer<typeof topicRowSchema>;
export type TopicsResponse = z.infer<typeof topicsResponseSchema>;
export type EntityCloud = z.infer<typeof entityCloudSchema>;
export type Timeline = z.infer<typeof timelineSchema>;
export type Post = z.infer<typeof postSchema>;
export type PostsPage = z.infer<typeof postsPageSchema>;
export type Recommendation = z.infer<typeof recommendationSchema>;
export type RecommendationsResponse = z.infer<typeof recommendationsResponseSchema>;
export type FeedbackAck = z.infer<typeof feedbackAckSchema>;
export type Granularity = Timeline["granularity"];
export type Relaxation = RecommendationsResponse["relaxation"];
export type TargetLabel = RecommendationsResponse["target"];

export interface FeedbackSubmission {
  post_id: string;
  field: "label" | "topic" | "sentiment" | "entity";
  proposed: unknown;
  prior: unknown;
  session?: string;
}

/** Service-reported failure (4xx/5xx with a structured body). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ConciergeClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    schema: z.ZodType<T>,
    path: string,
    init?: RequestInit,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const parsed = apiErrorSchema.safeParse(body);
      if (parsed.success) {
        throw new ApiError(
          response.status,
          parsed.data.code,
          parsed.data.message,
          parsed.data.detail ?? null,
        );
      }
      throw new ApiError(response.status, "http_error", `HTTP ${response.status}`);
    }
    return schema.parse(body);
  }

  health() {
    return this.request(healthSchema, "/health");
  }

  statsTopics() {
    return this.request(topicsResponseSchema, "/stats/topics");
  }

  statsEntities(topic: string, n = 50) {
    const params = new URLSearchParams({ topic, n: String(n) });
    return this.request(entityCloudSchema, `/stats/entities?${params}`);
  }

  statsTimeline(topic: string, granularity: Granularity = "day") {
    const params = new URLSearchParams({ topic, granularity });
    return this.request(timelineSchema, `/stats/timeline?${params}`);
  }

  posts(opts: { topic?: string; label?: string; page?: number; pageSize?: number } = {}) {
    const params = new URLSearchParams();
    if (opts.topic) params.set("topic", opts.topic);
    if (opts.label) params.set("label", opts.label);
    if (opts.page) params.set("page", String(opts.page));
    if (opts.pageSize) params.set("page_size", String(opts.pageSize));
    const suffix = params.size > 0 ? `?${params}` : "";
    return this.request(postsPageSchema, `/posts${suffix}`);
  }

  post(id: string) {
    return this.request(postSchema, `/posts/${encodeURIComponent(id)}`);
  }

  recommendations(
    id: string,
    k: number,
    target: TargetLabel = "non-misleading",
    relaxation: Relaxation = "sentiment-drop",
  ) {
    const params = new URLSearchParams({ k: String(k), target, relaxation });
    return this.request(
      recommendationsResponseSchema,
      `/posts/${encodeURIComponent(id)}/recommendations?${params}`,
    );
  }

  submitFeedback(submission: FeedbackSubmission) {
    return this.request(feedbackAckSchema, "/feedback", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
  }
}
