/**
 * Dashboard view state and its URL round trip.
 *
 * Everything an analyst has drilled into (view, topic, post, K, relaxation)
 * lives in the URL hash, so any analysis is a shareable link.
 */

import type { Relaxation } from "./api.js";

export type ViewName = "panoramic" | "tweet-centric";

export interface FeedbackDraft {
  field: "label" | "topic" | "sentiment" | "entity";
  proposed: unknown;
  prior: unknown;
}

export interface ViewState {
  view: ViewName;
  topic: string | null;
  postId: string | null;
  k: number;
  relaxation: Relaxation;
}

export const DEFAULT_K = 3;

export const RELAXATIONS: readonly Relaxation[] = ["strict", "entity-drop", "sentiment-drop"];

export function initialState(): ViewState {
  return {
    view: "panoramic",
    topic: null,
    postId: null,
    k: DEFAULT_K,
    relaxation: "sentiment-drop",
  };
}

/** Clamp/repair a candidate state so invariants hold (k >= 1; the
 * tweet-centric view requires a selected post). */
export function normalizeState(state: ViewState): ViewState {
  const k = Number.isFinite(state.k) && state.k >= 1 ? Math.floor(state.k) : DEFAULT_K;
  const relaxation = RELAXATIONS.includes(state.relaxation)
    ? state.relaxation
    : "sentiment-drop";
  const view = state.view === "tweet-centric" && state.postId ? "tweet-centric" : "panoramic";
  return { ...state, k, relaxation, view };
}

export function stateToHash(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.topic) params.set("topic", state.topic);
  if (state.k !== DEFAULT_K) params.set("k", String(state.k));
  if (state.relaxation !== "sentiment-drop") params.set("relaxation", state.relaxation);
  const query = params.toString();
  const path =
    state.view === "tweet-centric" && state.postId
      ? `/post/${encodeURIComponent(state.postId)}`
      : "/panoramic";
  return `#${path}${query ? `?${query}` : ""}`;
}

export function stateFromHash(hash: string): ViewState {
  const state = initialState();
  const trimmed = hash.replace(/^#/, "");
  if (!trimmed) return state;
  const [path = "", query = ""] = trimmed.split("?", 2);
  const params = new URLSearchParams(query);

  const postMatch = /^\/post\/(.+)$/.exec(path);
  if (postMatch && postMatch[1]) {
    state.view = "tweet-centric";
    state.postId = decodeURIComponent(postMatch[1]);
  }
  const topic = params.get("topic");
  if (topic) state.topic = topic;
  const k = params.get("k");
  if (k !== null) state.k = Number.parseInt(k, 10);
  const relaxation = params.get("relaxation");
  if (relaxation && (RELAXATIONS as readonly string[]).includes(relaxation)) {
    state.relaxation = relaxation as Relaxation;
  }
  return normalizeState(state);
}
