/** App entry: hash routing between the curation queue and annotation. */

import { ApiClient } from "./api.js";
import { AgreementDashboard } from "./views/agreement.js";
import { AnnotationForm } from "./views/annotate.js";
import { CurationQueue, WhatIfSlider } from "./views/curate.js";

const api = new ApiClient();

function el(tag: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (text) node.textContent = text;
  return node;
}

async function renderCurate(root: HTMLElement, bookId: string): Promise<void> {
  root.appendChild(el("h2", `Curating ${bookId}`));
  const queue = new CurationQueue(api, bookId, {
    onConflict: () => {
      const banner = el("p", "Another author decided this question first; reload to sync.");
      banner.className = "conflict-banner";
      root.prepend(banner);
    },
    onError: (message) => {
      const banner = el("p", `Could not save the decision (${message}); it was undone, retry.`);
      banner.className = "conflict-banner";
      root.prepend(banner);
    },
  });
  const slider = new WhatIfSlider(api, bookId);
  root.appendChild(slider.element);
  root.appendChild(queue.element);
  await Promise.all([queue.load(), slider.load()]);
}

async function renderAnnotate(root: HTMLElement, bookId: string, raterId: string): Promise<void> {
  const scheme = await api.getScheme();
  const page = await api.listQuestions({ book: bookId, shuffleSeed: 1 });
  root.appendChild(el("h2", `Annotating ${bookId} as ${raterId}`));
  let position = 0;
  const mount = el("div");
  root.appendChild(mount);
  const showNext = () => {
    mount.innerHTML = "";
    const question = page.questions[position];
    if (!question) {
      mount.appendChild(el("p", "Queue finished, thank you."));
      return;
    }
    const form = new AnnotationForm(scheme, question, api, raterId, {
      onSubmitted: () => {
        position += 1;
        showNext();
      },
    });
    mount.appendChild(form.render());
  };
  showNext();
}

async function renderDashboard(root: HTMLElement): Promise<void> {
  const scheme = await api.getScheme();
  root.appendChild(el("h2", "Inter-annotator agreement"));
  const dashboard = new AgreementDashboard(api, scheme);
  root.appendChild(dashboard.element);
  await dashboard.load();
}

export async function route(): Promise<void> {
  const root = document.querySelector<HTMLElement>("#app");
  if (!root) return;
  root.innerHTML = "";
  const [view, ...args] = window.location.hash.replace(/^#\/?/, "").split("/");
  try {
    if (view === "curate" && args[0]) {
      await renderCurate(root, args.join("/"));
    } else if (view === "annotate" && args.length >= 2) {
      const raterId = args.pop()!;
      await renderAnnotate(root, args.join("/"), raterId);
    } else if (view === "agreement") {
      await renderDashboard(root);
    } else {
      root.appendChild(el("h2", "defquest review"));
      root.appendChild(
        el("p", "Open #/curate/<book>, #/annotate/<book>/<rater> or #/agreement."),
      );
    }
  } catch (error) {
    root.appendChild(el("p", `Error: ${(error as Error).message}`));
  }
}

if (typeof window !== "undefined" && "onhashchange" in window) {
  window.addEventListener("hashchange", () => void route());
  void route();
}
