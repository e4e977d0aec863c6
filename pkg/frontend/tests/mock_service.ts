/**
 * In-memory mock of the concierge API, driving the dashboard tests without
 * a backend. Implements the same wire contract (shapes, error envelope,
 * k-monotonic recommendation prefixes) and records every call it serves.
 */

import type { FetchLike } from "../src/api.js";

export interface RecordedCall {
  method: string;
  path: string;
  params: Record<string, string>;
  body: unknown;
}

const POSTS: Record<string, object> = {};

function addPost(
  id: string,
  text: string,
  label: string | null,
  topic: string,
  sentiment: "positive" | "negative" | "neutral",
  entities: Array<[string, string]>,
): void {
  POSTS[id] = {
    id,
    text,
    timestamp: "2021-01-05T10:00:00Z",
    source: "mock",
    label,
    label_confidence: label ? 1.0 : null,
    label_source: label ? "human" : null,
    topic: { name: topic, matched_terms: [], rescue: false },
    entities: entities.map(([surface, etype], i) => ({
      surface,
      start: i,
      end: i + 1,
      type: etype,
      method: "exact",
      score: 1.0,
    })),
    sentiment: { compound: sentiment === "negative" ? -0.5 : sentiment === "positive" ? 0.5 : 0.0, pos: 0.3, neu: 0.4, neg: 0.3, class: sentiment },
    vector_id: id,
    versions: { label: "human" },
  };
}

addPost("p1", "the pfizer shot is poison", "misleading", "Shots", "negative", [["pfizer", "VAC_TYPE"]]);
addPost("p2", "pfizer shot safety data is public", "non-misleading", "Shots", "negative", [["pfizer", "VAC_TYPE"]]);
addPost("p3", "regulators reviewed the pfizer data", "non-misleading", "Shots", "negative", [["pfizer", "VAC_TYPE"]]);
addPost("p4", "boosters work fine", "non-misleading", "Shots", "negative", [["booster", "VAC_TYPE"]]);
addPost("p5", "trial results are solid", "non-misleading", "Shots", "positive", [["pfizer", "VAC_TYPE"]]);
addPost("p6", "microchips in every dose", "misleading", "Myths", "negative", [["pfizer", "VAC_TYPE"]]);
addPost("p7", "the moderna dose is deadly", "misleading", "Shots", "negative", [["moderna", "VAC_TYPE"]]);

/** Fixed ranked candidate list per (source, target); the mock serves the
 * first k, which is exactly the real service's k-monotonic behavior. */
const RANKINGS: Record<string, Array<{ post_id: string; similarity: number; relaxed: boolean }>> = {
  "p1:non-misleading": [
    { post_id: "p2", similarity: 0.93, relaxed: false },
    { post_id: "p3", similarity: 0.88, relaxed: false },
    { post_id: "p4", similarity: 0.91, relaxed: true },
    { post_id: "p5", similarity: 0.87, relaxed: true },
  ],
  "p1:misleading": [
    { post_id: "p7", similarity: 0.9, relaxed: false },
    { post_id: "p6", similarity: 0.61, relaxed: true },
  ],
};

const TOPIC_ROWS = [
  { topic: "Shots", misleading: 2, non_misleading: 4, unlabeled: 0, total: 6, percentage: 85.71 },
  { topic: "Myths", misleading: 1, non_misleading: 0, unlabeled: 0, total: 1, percentage: 14.29 },
];

const ENTITY_CLOUDS: Record<string, object> = {
  Shots: {
    topic: "Shots",
    misleading: [
      { surface: "pfizer", type: "VAC_TYPE", count: 2 },
      { surface: "moderna", type: "VAC_TYPE", count: 1 },
    ],
    non_misleading: [
      { surface: "pfizer", type: "VAC_TYPE", count: 3 },
      { surface: "booster", type: "VAC_TYPE", count: 1 },
    ],
  },
  Myths: {
    topic: "Myths",
    misleading: [{ surface: "pfizer", type: "VAC_TYPE", count: 1 }],
    non_misleading: [],
  },
};

const TIMELINES: Record<string, object> = {
  Shots: {
    granularity: "day",
    buckets: [
      { start: "2021-01-05T00:00:00Z", misleading: 1, non_misleading: 2, unlabeled: 0 },
      { start: "2021-01-06T00:00:00Z", misleading: 1, non_misleading: 2, unlabeled: 0 },
    ],
  },
  Myths: {
    granularity: "day",
    buckets: [{ start: "2021-01-05T00:00:00Z", misleading: 1, non_misleading: 0, unlabeled: 0 }],
  },
};

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json", "X-Snapshot-Version": "1" },
  });
}

function apiError(status: number, code: string, message: string): Response {
  return json(status, { code, message, detail: null });
}

export interface MockService {
  fetch: FetchLike;
  calls: RecordedCall[];
  feedbackSubmissions: unknown[];
  callsTo(path: string): RecordedCall[];
}

export function createMockService(): MockService {
  const calls: RecordedCall[] = [];
  const feedbackSubmissions: unknown[] = [];
  let feedbackSeq = 0;

  const fetchImpl: FetchLike = async (input, init) => {
    const url = new URL(input, "http://mock");
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    calls.push({
      method,
      path: url.pathname,
      params: Object.fromEntries(url.searchParams),
      body,
    });

    if (url.pathname === "/health") {
      return json(200, { status: "ok", snapshot_version: 1 });
    }
    if (url.pathname === "/stats/topics") {
      return json(200, {
        total: 7,
        rows: TOPIC_ROWS,
        report: TOPIC_ROWS.map((r) => ({ topic: r.topic, count: r.total, percentage: r.percentage })),
      });
    }
    if (url.pathname === "/stats/entities") {
      const topic = url.searchParams.get("topic") ?? "";
      const cloud = ENTITY_CLOUDS[topic];
      return cloud ? json(200, cloud) : apiError(404, "not_found", `unknown topic: ${topic}`);
    }
    if (url.pathname === "/stats/timeline") {
      const topic = url.searchParams.get("topic") ?? "";
      const timeline = TIMELINES[topic];
      return timeline ? json(200, timeline) : apiError(404, "not_found", `unknown topic: ${topic}`);
    }
    const recMatch = /^\/posts\/([^/]+)\/recommendations$/.exec(url.pathname);
    if (recMatch) {
      const id = decodeURIComponent(recMatch[1] ?? "");
      if (!(id in POSTS)) return apiError(404, "not_found", `unknown post: ${id}`);
      const k = Number(url.searchParams.get("k") ?? "3");
      const target = url.searchParams.get("target") ?? "non-misleading";
      const relaxation = url.searchParams.get("relaxation") ?? "sentiment-drop";
      const ranked = RANKINGS[`${id}:${target}`] ?? [];
      const eligible = relaxation === "strict" ? ranked.filter((r) => !r.relaxed) : ranked;
      return json(200, {
        source_id: id,
        k,
        target,
        relaxation,
        items: eligible.slice(0, k).map((r) => ({
          post_id: r.post_id,
          similarity: r.similarity,
          matched_criteria: {
            topic: true,
            entities: r.relaxed ? [] : [["pfizer", "VAC_TYPE"]],
            sentiment: !r.relaxed,
          },
          relaxed: r.relaxed,
        })),
      });
    }
    const postMatch = /^\/posts\/([^/]+)$/.exec(url.pathname);
    if (postMatch) {
      const id = decodeURIComponent(postMatch[1] ?? "");
      const post = POSTS[id];
      return post ? json(200, post) : apiError(404, "not_found", `unknown post: ${id}`);
    }
    if (url.pathname === "/posts") {
      const items = Object.values(POSTS);
      return json(200, { total: items.length, page: 1, page_size: 20, items });
    }
    if (url.pathname === "/feedback" && method === "POST") {
      const submission = body as { post_id?: string; field?: string; proposed?: unknown; prior?: unknown };
      if (!submission?.post_id || !(submission.post_id in POSTS)) {
        return apiError(404, "not_found", `unknown post: ${submission?.post_id}`);
      }
      if (!["label", "topic", "sentiment", "entity"].includes(submission.field ?? "")) {
        return apiError(422, "validation_error", `unknown feedback field: ${submission.field}`);
      }
      if (JSON.stringify(submission.proposed) === JSON.stringify(submission.prior)) {
        return apiError(422, "validation_error", "proposed value must differ from prior");
      }
      feedbackSeq += 1;
      feedbackSubmissions.push(submission);
      return json(200, {
        id: `fb-${String(feedbackSeq).padStart(6, "0")}`,
        seq: feedbackSeq,
        submitted_at: "2021-03-01T00:00:00Z",
      });
    }
    return apiError(404, "not_found", `no route: ${url.pathname}`);
  };

  return {
    fetch: fetchImpl,
    calls,
    feedbackSubmissions,
    callsTo(path: string) {
      return calls.filter((c) => c.path === path);
    },
  };
}
