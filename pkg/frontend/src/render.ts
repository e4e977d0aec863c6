/**
 * Thin DOM layer over the headless controller. Every number shown here is
 * read verbatim from an API response held in the controller's data slots;
 * the only client-side arithmetic is presentation scaling (bar widths,
 * cloud font sizes).
 */

import type { EntityCloud, Post, Recommendation, Timeline, TopicRow } from "./api.js";
import type { DashboardController } from "./controller.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

// -- panoramic view -----------------------------------------------------------

function renderTopicBars(
  container: HTMLElement,
  rows: TopicRow[],
  selected: string | null,
  onSelect: (topic: string) => void,
): void {
  const maxTotal = rows.reduce((acc, row) => Math.max(acc, row.total), 0);
  if (maxTotal === 0) {
    container.appendChild(el("p", "empty-state", "no data in the corpus yet"));
    return;
  }
  for (const row of rows) {
    if (row.total === 0) continue;
    const item = el("div", "topic-row" + (row.topic === selected ? " selected" : ""));
    item.dataset.topic = row.topic;
    const label = el("span", "topic-name", `${row.topic} (${row.percentage.toFixed(2)}%)`);
    const bar = el("div", "topic-bar");
    const m = el("div", "bar-m");
    m.style.width = `${(100 * row.misleading) / maxTotal}%`;
    m.title = `M: ${row.misleading}`;
    const nm = el("div", "bar-nm");
    nm.style.width = `${(100 * row.non_misleading) / maxTotal}%`;
    nm.title = `NM: ${row.non_misleading}`;
    bar.append(m, nm);
    const counts = el(
      "span",
      "topic-counts",
      `M ${row.misleading} / NM ${row.non_misleading} / total ${row.total}`,
    );
    item.append(label, bar, counts);
    item.addEventListener("click", () => onSelect(row.topic));
    container.appendChild(item);
  }
}

function renderCloud(container: HTMLElement, entries: EntityCloud["misleading"]): void {
  if (entries.length === 0) {
    container.appendChild(el("p", "empty-state", "no entities"));
    return;
  }
  const max = entries[0]?.count ?? 1;
  const min = entries[entries.length - 1]?.count ?? 1;
  for (const entry of entries) {
    const scale = max === min ? 1 : (entry.count - min) / (max - min);
    const tag = el("span", `cloud-tag etype-${entry.type}`, entry.surface);
    tag.style.fontSize = `${0.8 + 1.2 * scale}em`;
    tag.title = `${entry.type}: ${entry.count}`;
    container.appendChild(tag);
  }
}

function renderTimeline(container: HTMLElement, timeline: Timeline): void {
  if (timeline.buckets.length === 0) {
    container.appendChild(el("p", "empty-state", "no posts in this topic"));
    return;
  }
  const peak = timeline.buckets.reduce(
    (acc, b) => Math.max(acc, b.misleading + b.non_misleading + b.unlabeled),
    1,
  );
  const strip = el("div", "timeline-strip");
  for (const bucket of timeline.buckets) {
    const column = el("div", "timeline-col");
    const total = bucket.misleading + bucket.non_misleading + bucket.unlabeled;
    const m = el("div", "col-m");
    m.style.height = `${(100 * bucket.misleading) / peak}%`;
    const nm = el("div", "col-nm");
    nm.style.height = `${(100 * bucket.non_misleading) / peak}%`;
    column.append(nm, m);
    column.title = `${bucket.start.slice(0, 10)} — M ${bucket.misleading}, NM ${bucket.non_misleading}, total ${total}`;
    strip.appendChild(column);
  }
  container.appendChild(strip);
}

// -- tweet-centric view -------------------------------------------------------

function labelChip(post: Post): HTMLElement {
  if (post.label === null) return el("span", "chip chip-unlabeled", "unlabeled");
  const confidence =
    post.label_confidence !== null ? ` ${(100 * post.label_confidence).toFixed(1)}%` : "";
  return el("span", `chip chip-${post.label}`, `${post.label}${confidence}`);
}

function renderPostCard(container: HTMLElement, post: Post): void {
  const card = el("article", "post-card");
  card.appendChild(el("p", "post-text", post.text));
  const meta = el("div", "post-meta");
  meta.appendChild(labelChip(post));
  if (post.topic) {
    meta.appendChild(
      el("span", "chip chip-topic", post.topic.rescue ? `${post.topic.name} (rescued)` : post.topic.name),
    );
  }
  if (post.sentiment) {
    meta.appendChild(
      el(
        "span",
        `chip chip-sent-${post.sentiment.class}`,
        `${post.sentiment.class} (${post.sentiment.compound.toFixed(3)})`,
      ),
    );
  }
  for (const entity of post.entities ?? []) {
    meta.appendChild(el("span", `chip chip-entity etype-${entity.type}`, `${entity.surface} · ${entity.type}`));
  }
  card.appendChild(meta);
  container.appendChild(card);
}

function renderRecommendationList(
  container: HTMLElement,
  items: Recommendation[],
  emptyMessage: string,
  onOpen: (postId: string) => void,
): void {
  if (items.length === 0) {
    container.appendChild(el("p", "empty-state", emptyMessage));
    return;
  }
  const list = el("ol", "rec-list");
  for (const item of items) {
    const entry = el("li", "rec-item" + (item.relaxed ? " relaxed" : ""));
    const head = el("div", "rec-head");
    head.appendChild(el("span", "rec-id", item.post_id));
    head.appendChild(el("span", "rec-sim", `cos ${item.similarity.toFixed(4)}`));
    if (item.relaxed) head.appendChild(el("span", "rec-flag", "relaxed match"));
    entry.appendChild(head);
    const matched = el("div", "rec-matched");
    const pairs = item.matched_criteria.entities
      .map(([surface, etype]) => `${surface}/${etype}`)
      .join(", ");
    matched.textContent = `topic ${item.matched_criteria.topic ? "✓" : "–"} · sentiment ${item.matched_criteria.sentiment ? "✓" : "–"} · entities ${pairs || "–"}`;
    entry.appendChild(matched);
    entry.addEventListener("click", () => onOpen(item.post_id));
    list.appendChild(entry);
  }
  container.appendChild(list);
}

// -- top-level render ----------------------------------------------------------

export function render(root: HTMLElement, controller: DashboardController): void {
  clear(root);
  const { state, data } = controller;

  if (data.unreachable) {
    const banner = el("div", "banner banner-error");
    banner.appendChild(el("span", undefined, "service unreachable — data may be missing"));
    const retry = el("button", "retry", "retry");
    retry.addEventListener("click", () => {
      void controller.loadPanoramic();
      if (state.postId) void controller.openPost(state.postId);
    });
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  const nav = el("nav", "view-nav");
  const panoramicBtn = el(
    "button",
    state.view === "panoramic" ? "active" : "",
    "Panoramic view",
  );
  panoramicBtn.addEventListener("click", () => controller.backToPanoramic());
  nav.appendChild(panoramicBtn);
  if (state.postId) {
    const tweetBtn = el(
      "button",
      state.view === "tweet-centric" ? "active" : "",
      `Post ${state.postId}`,
    );
    tweetBtn.addEventListener("click", () => void controller.openPost(state.postId!));
    nav.appendChild(tweetBtn);
  }
  root.appendChild(nav);

  if (state.view === "panoramic") {
    renderPanoramic(root, controller);
  } else {
    renderTweetCentric(root, controller);
  }
}

function renderPanoramic(root: HTMLElement, controller: DashboardController): void {
  const { state, data } = controller;
  const section = el("section", "panoramic");
  section.appendChild(el("h2", undefined, "Topic distribution (M vs NM)"));
  if (data.topics.loading) section.appendChild(el("p", "loading", "loading topics…"));
  if (data.topics.error) section.appendChild(el("p", "error", data.topics.error));
  if (data.topics.data) {
    if (data.topics.data.total === 0) {
      section.appendChild(el("p", "empty-state", "no data in the corpus yet"));
    } else {
      const bars = el("div", "topic-bars");
      renderTopicBars(bars, data.topics.data.rows, state.topic, (topic) => {
        void controller.selectTopic(topic);
      });
      section.appendChild(bars);
    }
  }
  root.appendChild(section);

  if (state.topic) {
    const detail = el("section", "topic-detail");
    detail.appendChild(el("h2", undefined, `Entities in "${state.topic}"`));
    if (data.entities.loading) detail.appendChild(el("p", "loading", "loading entities…"));
    if (data.entities.error) detail.appendChild(el("p", "error", data.entities.error));
    if (data.entities.data) {
      const split = el("div", "cloud-split");
      const mBox = el("div", "cloud-box");
      mBox.appendChild(el("h3", undefined, "Misleading"));
      renderCloud(mBox, data.entities.data.misleading);
      const nmBox = el("div", "cloud-box");
      nmBox.appendChild(el("h3", undefined, "Non-misleading"));
      renderCloud(nmBox, data.entities.data.non_misleading);
      split.append(mBox, nmBox);
      detail.appendChild(split);
    }
    detail.appendChild(el("h2", undefined, "Traction over time"));
    if (data.timeline.loading) detail.appendChild(el("p", "loading", "loading timeline…"));
    if (data.timeline.error) detail.appendChild(el("p", "error", data.timeline.error));
    if (data.timeline.data) renderTimeline(detail, data.timeline.data);
    root.appendChild(detail);
  }
}

function renderTweetCentric(root: HTMLElement, controller: DashboardController): void {
  const { state, data } = controller;
  const section = el("section", "tweet-centric");

  if (data.post.loading) section.appendChild(el("p", "loading", "loading post…"));
  if (data.post.error) section.appendChild(el("p", "error", `post not found: ${data.post.error}`));
  if (data.post.data) renderPostCard(section, data.post.data);

  const controls = el("div", "k-controls");
  controls.appendChild(el("label", undefined, "K"));
  const kInput = el("input") as HTMLInputElement;
  kInput.type = "number";
  kInput.min = "1";
  kInput.value = String(state.k);
  kInput.addEventListener("change", () => void controller.setK(Number(kInput.value)));
  controls.appendChild(kInput);
  const relaxationSelect = el("select") as HTMLSelectElement;
  for (const value of ["strict", "entity-drop", "sentiment-drop"] as const) {
    const option = el("option", undefined, value) as HTMLOptionElement;
    option.value = value;
    option.selected = value === state.relaxation;
    relaxationSelect.appendChild(option);
  }
  relaxationSelect.addEventListener("change", () =>
    void controller.setRelaxation(relaxationSelect.value as typeof state.relaxation),
  );
  controls.appendChild(relaxationSelect);
  section.appendChild(controls);

  const panels = el("div", "rec-panels");
  const rebuttals = el("div", "rec-panel");
  rebuttals.appendChild(el("h3", undefined, "Rebuttal candidates (non-misleading)"));
  if (data.recommendations.loading) rebuttals.appendChild(el("p", "loading", "loading…"));
  if (data.recommendations.error) rebuttals.appendChild(el("p", "error", data.recommendations.error));
  if (data.recommendations.data) {
    renderRecommendationList(
      rebuttals,
      data.recommendations.data.items,
      "no counter-message found",
      (id) => void controller.openPost(id),
    );
  }
  const echoes = el("div", "rec-panel");
  echoes.appendChild(el("h3", undefined, "Similar misleading posts"));
  if (data.similar.loading) echoes.appendChild(el("p", "loading", "loading…"));
  if (data.similar.error) echoes.appendChild(el("p", "error", data.similar.error));
  if (data.similar.data) {
    renderRecommendationList(
      echoes,
      data.similar.data.items,
      "none found",
      (id) => void controller.openPost(id),
    );
  }
  panels.append(rebuttals, echoes);
  section.appendChild(panels);

  section.appendChild(renderFeedbackForm(controller));
  root.appendChild(section);
}

function renderFeedbackForm(controller: DashboardController): HTMLElement {
  const { data } = controller;
  const post = data.post.data;
  const box = el("div", "feedback-box");
  box.appendChild(el("h3", undefined, "Flag an incorrect annotation"));
  box.appendChild(
    el("p", "hint", "Corrections are stored immediately and applied at the next retrain."),
  );
  if (!post) return box;

  const fieldSelect = el("select") as HTMLSelectElement;
  for (const field of ["label", "topic", "sentiment", "entity"]) {
    const option = el("option", undefined, field) as HTMLOptionElement;
    option.value = field;
    fieldSelect.appendChild(option);
  }
  const proposedInput = el("input") as HTMLInputElement;
  proposedInput.placeholder = "proposed value";
  const submit = el("button", "submit-feedback", "submit correction");

  const currentValue = (field: string): unknown => {
    switch (field) {
      case "label":
        return post.label;
      case "topic":
        return post.topic?.name ?? null;
      case "sentiment":
        return post.sentiment?.class ?? null;
      default:
        return null;
    }
  };

  submit.addEventListener("click", () => {
    const field = fieldSelect.value as "label" | "topic" | "sentiment" | "entity";
    const raw = proposedInput.value.trim();
    const proposed =
      field === "entity" ? safeParseEntity(raw) : raw;
    controller.setDraft({ field, proposed, prior: currentValue(field) });
    void controller.submitFeedback();
  });

  box.append(fieldSelect, proposedInput, submit);
  if (data.feedback.validationError) {
    box.appendChild(el("p", "error inline-error", data.feedback.validationError));
  }
  if (data.feedback.networkError) {
    box.appendChild(el("p", "error inline-error", data.feedback.networkError));
  }
  if (data.feedback.storedId) {
    box.appendChild(
      el("p", "stored", `stored as ${data.feedback.storedId} — pending retrain`),
    );
  }
  return box;
}

function safeParseEntity(raw: string): unknown {
  // entity corrections are "surface:TYPE" in the form, sent as an object
  const [surface, etype] = raw.split(":", 2);
  return { surface: surface?.trim() ?? "", type: etype?.trim() ?? "" };
}
