/**
 * Bootstrap: wire the controller to the DOM and keep the view state in the
 * URL hash so analyses are shareable links.
 */

import { ConciergeClient } from "./api.js";
import { DashboardController } from "./controller.js";
import { render } from "./render.js";
import { stateFromHash, stateToHash } from "./state.js";

const API_BASE = (window as { CONCIERGE_API?: string }).CONCIERGE_API ?? "";

function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const controller = new DashboardController(
    new ConciergeClient(API_BASE),
    stateFromHash(window.location.hash),
  );

  let applyingHash = false;
  controller.subscribe(() => {
    render(root, controller);
    const hash = stateToHash(controller.state);
    if (!applyingHash && window.location.hash !== hash) {
      window.history.replaceState(null, "", hash);
    }
  });

  window.addEventListener("hashchange", () => {
    applyingHash = true;
    const state = stateFromHash(window.location.hash);
    controller.state = state;
    void controller.loadPanoramic();
    if (state.postId) void controller.openPost(state.postId);
    applyingHash = false;
  });

  void controller.loadPanoramic();
  if (controller.state.postId) void controller.openPost(controller.state.postId);
}

start();
