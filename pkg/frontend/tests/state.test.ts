import { describe, expect, it } from "vitest";

import {
  DEFAULT_K,
  initialState,
  normalizeState,
  stateFromHash,
  stateToHash,
  type ViewState,
} from "../src/state.js";

describe("view state URL round trip", () => {
  const cases: ViewState[] = [
    initialState(),
    { view: "panoramic", topic: "Shots", postId: null, k: 3, relaxation: "sentiment-drop" },
    { view: "tweet-centric", topic: null, postId: "t001", k: 5, relaxation: "strict" },
    { view: "tweet-centric", topic: "Myths", postId: "id with spaces", k: 1, relaxation: "entity-drop" },
  ];

  it.each(cases.map((c) => [stateToHash(c), c] as const))("round-trips %s", (_hash, state) => {
    expect(stateFromHash(stateToHash(state))).toEqual(normalizeState(state));
  });

  it("defaults on an empty hash", () => {
    expect(stateFromHash("")).toEqual(initialState());
    expect(stateFromHash("#/panoramic")).toEqual(initialState());
  });

  it("keeps K out of the URL when it is the default", () => {
    const hash = stateToHash({ ...initialState(), topic: "Shots" });
    expect(hash).not.toContain("k=");
    expect(hash).toContain("topic=Shots");
  });

  it("parses post links", () => {
    const state = stateFromHash("#/post/t042?k=5");
    expect(state.view).toBe("tweet-centric");
    expect(state.postId).toBe("t042");
    expect(state.k).toBe(5);
  });
});

describe("state invariants", () => {
  it("k is at least 1", () => {
    expect(normalizeState({ ...initialState(), k: 0 }).k).toBe(DEFAULT_K);
    expect(normalizeState({ ...initialState(), k: -3 }).k).toBe(DEFAULT_K);
    expect(normalizeState({ ...initialState(), k: Number.NaN }).k).toBe(DEFAULT_K);
    expect(normalizeState({ ...initialState(), k: 2.9 }).k).toBe(2);
  });

  it("tweet-centric requires a selected post", () => {
    const state = normalizeState({
      view: "tweet-centric",
      topic: null,
      postId: null,
      k: 3,
      relaxation: "sentiment-drop",
    });
    expect(state.view).toBe("panoramic");
  });

  it("default K is three", () => {
    expect(DEFAULT_K).toBe(3);
    expect(initialState().k).toBe(3);
  });

  it("unknown relaxation values fall back to the service default", () => {
    const state = normalizeState({
      ...initialState(),
      relaxation: "everything" as never,
    });
    expect(state.relaxation).toBe("sentiment-drop");
  });
});
