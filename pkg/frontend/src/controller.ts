/**
 * Headless dashboard controller: owns the view state, issues API queries,
 * and exposes the fetched data to the render layer.
 *
 * Concurrency rule: every data slot carries a request-sequence token;
 * a response is applied only if it is still the newest request for that
 * slot, so stale responses can never overwrite fresh ones.
 */

import {
  ApiError,
  ConciergeClient,
  type EntityCloud,
  type FeedbackAck,
  type FeedbackSubmission,
  type Post,
  type RecommendationsResponse,
  type Relaxation,
  type Timeline,
  type TopicsResponse,
} from "./api.js";
import {
  DEFAULT_K,
  initialState,
  normalizeState,
  type FeedbackDraft,
  type ViewState,
} from "./state.js";

export interface Slot<T> {
  data: T | null;
  loading: boolean;
  error: string | null;
}

function emptySlot<T>(): Slot<T> {
  return { data: null, loading: false, error: null };
}

export interface FeedbackState {
  draft: FeedbackDraft | null;
  validationError: string | null;
  submitting: boolean;
  /** id of the stored record, shown as "pending retrain" */
  storedId: string | null;
  networkError: string | null;
}

export interface DashboardData {
  topics: Slot<TopicsResponse>;
  entities: Slot<EntityCloud>;
  timeline: Slot<Timeline>;
  post: Slot<Post>;
  recommendations: Slot<RecommendationsResponse>;
  similar: Slot<RecommendationsResponse>;
  feedback: FeedbackState;
  /** set when the service is unreachable; the UI shows a retry banner */
  unreachable: boolean;
}

type Listener = (controller: DashboardController) => void;
type SlotName = "topics" | "entities" | "timeline" | "post" | "recommendations" | "similar";

export class DashboardController {
  state: ViewState;
  readonly data: DashboardData;
  private readonly listeners = new Set<Listener>();
  private readonly tokens: Record<SlotName, number> = {
    topics: 0,
    entities: 0,
    timeline: 0,
    post: 0,
    recommendations: 0,
    similar: 0,
  };

  constructor(
    private readonly client: ConciergeClient,
    state: ViewState = initialState(),
  ) {
    this.state = normalizeState(state);
    this.data = {
      topics: emptySlot(),
      entities: emptySlot(),
      timeline: emptySlot(),
      post: emptySlot(),
      recommendations: emptySlot(),
      similar: emptySlot(),
      feedback: {
        draft: null,
        validationError: null,
        submitting: false,
        storedId: null,
        networkError: null,
      },
      unreachable: false,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this);
  }

  private async load<T>(
    slot: SlotName,
    request: () => Promise<T>,
  ): Promise<void> {
    const token = ++this.tokens[slot];
    const target = this.data[slot] as Slot<T>;
    target.loading = true;
    target.error = null;
    this.notify();
    try {
      const result = await request();
      if (this.tokens[slot] !== token) return; // stale response: discard
      target.data = result;
      target.loading = false;
      this.data.unreachable = false;
    } catch (error) {
      if (this.tokens[slot] !== token) return;
      target.loading = false;
      if (error instanceof ApiError) {
        target.error = error.message;
      } else {
        target.error = "service unreachable";
        this.data.unreachable = true;
      }
    }
    this.notify();
  }

  /** Initial panoramic load; also the retry-banner action. */
  async loadPanoramic(): Promise<void> {
    const jobs = [this.load("topics", () => this.client.statsTopics())];
    if (this.state.topic) {
      jobs.push(this.loadTopicDetail(this.state.topic));
    }
    await Promise.all(jobs);
  }

  /** Topic click: drill into entity clouds and the topic's timeline. */
  async selectTopic(topic: string): Promise<void> {
    this.state = normalizeState({ ...this.state, topic });
    await this.loadTopicDetail(topic);
  }

  private loadTopicDetail(topic: string): Promise<void> {
    return Promise.all([
      this.load("entities", () => this.client.statsEntities(topic, 50)),
      this.load("timeline", () => this.client.statsTimeline(topic, "day")),
    ]).then(() => undefined);
  }

  /** Open the tweet-centric view for a post. */
  async openPost(postId: string): Promise<void> {
    this.state = normalizeState({ ...this.state, view: "tweet-centric", postId });
    this.resetFeedback();
    await Promise.all([
      this.load("post", () => this.client.post(postId)),
      this.refetchRecommendations(),
    ]);
  }

  backToPanoramic(): void {
    this.state = normalizeState({ ...this.state, view: "panoramic", postId: null });
    this.notify();
  }

  /** K selector change: refetch both recommendation panels. */
  async setK(k: number): Promise<void> {
    if (!Number.isFinite(k) || k < 1) {
      this.data.feedback.validationError = "K must be at least 1";
      this.notify();
      return;
    }
    this.state = normalizeState({ ...this.state, k: Math.floor(k) });
    await this.refetchRecommendations();
  }

  async setRelaxation(relaxation: Relaxation): Promise<void> {
    this.state = normalizeState({ ...this.state, relaxation });
    await this.refetchRecommendations();
  }

  private async refetchRecommendations(): Promise<void> {
    const { postId, k, relaxation } = this.state;
    if (!postId) return;
    await Promise.all([
      this.load("recommendations", () =>
        this.client.recommendations(postId, k, "non-misleading", relaxation),
      ),
      this.load("similar", () =>
        this.client.recommendations(postId, k, "misleading", relaxation),
      ),
    ]);
  }

  // -- feedback -------------------------------------------------------------

  setDraft(draft: FeedbackDraft | null): void {
    this.data.feedback.draft = draft;
    this.data.feedback.validationError = null;
    this.data.feedback.storedId = null;
    this.notify();
  }

  private resetFeedback(): void {
    this.data.feedback = {
      draft: null,
      validationError: null,
      submitting: false,
      storedId: null,
      networkError: null,
    };
  }

  /**
   * Validate and submit the pending draft.
   *
   * proposed == prior is rejected client-side (no request); a service 422
   * surfaces as an inline error; a network failure preserves the draft for
   * resubmission. Success stores the record id, displayed as pending
   * retrain.
   */
  async submitFeedback(): Promise<FeedbackAck | null> {
    const feedback = this.data.feedback;
    const draft = feedback.draft;
    const postId = this.state.postId;
    if (!draft || !postId) {
      feedback.validationError = "nothing to submit";
      this.notify();
      return null;
    }
    if (JSON.stringify(draft.proposed) === JSON.stringify(draft.prior)) {
      feedback.validationError = "proposed value must differ from the current one";
      this.notify();
      return null;
    }
    const submission: FeedbackSubmission = {
      post_id: postId,
      field: draft.field,
      proposed: draft.proposed,
      prior: draft.prior,
      session: "dashboard",
    };
    feedback.submitting = true;
    feedback.validationError = null;
    feedback.networkError = null;
    this.notify();
    try {
      const ack = await this.client.submitFeedback(submission);
      feedback.submitting = false;
      feedback.storedId = ack.id;
      feedback.draft = null; // accepted; effect is deferred to retrain
      this.notify();
      return ack;
    } catch (error) {
      feedback.submitting = false;
      if (error instanceof ApiError) {
        feedback.validationError = error.message; // e.g. 422 from the service
      } else {
        feedback.networkError = "network failure; draft preserved";
      }
      this.notify(); // draft intentionally kept for resubmission
      return null;
    }
  }

  get defaultK(): number {
    return DEFAULT_K;
  }
}
