/**
 * Curation queue: accept / reject / edit with optimistic updates, running
 * counts, and a threshold what-if slider backed by the sweep endpoint.
 * Keyboard: a = accept, r = reject, e = edit.
 */

import { ApiClient, ApiError } from "../api.js";
import { optimistic } from "../optimistic.js";
import type { QuestionRow, SweepPoint } from "../types.js";

export class WhatIfSlider {
  /** Sweep points fetched once; the slider reads counts locally. */
  private points: SweepPoint[] = [];
  readonly element: HTMLElement;
  private input: HTMLInputElement;
  private label: HTMLElement;

  constructor(
    private api: ApiClient,
    private bookId: string,
    thresholds?: number[],
  ) {
    this.thresholds = thresholds ?? Array.from({ length: 21 }, (_, i) => i / 20);
    this.element = document.createElement("div");
    this.element.className = "what-if";
    this.input = document.createElement("input");
    this.input.type = "range";
    this.input.id = "threshold-slider";
    this.input.min = "0";
    this.input.max = String(this.thresholds.length - 1);
    this.input.step = "1";
    this.input.value = "0";
    this.label = document.createElement("output");
    this.label.id = "threshold-count";
    this.input.oninput = () => this.update();
    this.element.append(this.input, this.label);
  }

  private thresholds: number[];

  async load(): Promise<void> {
    const { points } = await this.api.sweep(this.bookId, this.thresholds);
    this.points = points;
    this.update();
  }

  setPosition(index: number): void {
    this.input.value = String(index);
    this.update();
  }

  get position(): number {
    return Number(this.input.value);
  }

  countAt(index: number): number {
    return this.points[index]?.count ?? 0;
  }

  private update(): void {
    const point = this.points[this.position];
    if (point) {
      this.label.textContent = `threshold ${point.threshold.toFixed(2)}: ${point.count} questions`;
      this.label.dataset.count = String(point.count);
    }
  }
}

export interface CurateCallbacks {
  onConflict?: (questionId: string) => void;
  onError?: (message: string) => void;
}

const PREFIX_BUCKETS = ["What is", "What are", "What does"];

/** Section id of a paragraph id (its parent in the id hierarchy). */
function sectionOf(paragraphId: string): string {
  return paragraphId.split("/").slice(0, -1).join("/");
}

function prefixBucket(questionText: string): string {
  const tokens = questionText
    .split(/\s+/)
    .map((t) => t.replace(/[?!.,;:]+$/, ""))
    .filter((t) => t.length > 0);
  if (tokens.length === 0) return "other";
  const two = `${tokens[0]} ${tokens[1] ?? ""}`.trim();
  return PREFIX_BUCKETS.includes(two) ? two : tokens[0];
}

export function sectionCounts(rows: QuestionRow[]): Map<string, number> {
  const counts = new Map<string, number>();
  for (const row of rows) {
    const section = sectionOf(row.paragraph_id);
    counts.set(section, (counts.get(section) ?? 0) + 1);
  }
  return counts;
}

export function prefixShares(rows: QuestionRow[]): Map<string, number> {
  const counts = new Map<string, number>();
  for (const row of rows) {
    const bucket = prefixBucket(row.question_text);
    counts.set(bucket, (counts.get(bucket) ?? 0) + 1);
  }
  const shares = new Map<string, number>();
  for (const [bucket, count] of counts) shares.set(bucket, count / rows.length);
  return shares;
}

export class CurationQueue {
  readonly element: HTMLElement;
  private rows: QuestionRow[] = [];
  private counts = { pending: 0, accepted: 0, rejected: 0 };

  constructor(
    private api: ApiClient,
    private bookId: string,
    private callbacks: CurateCallbacks = {},
  ) {
    this.element = document.createElement("section");
    this.element.className = "curation-queue";
  }

  async load(): Promise<void> {
    const page = await this.api.listQuestions({ book: this.bookId, pageSize: 200 });
    this.rows = page.questions;
    this.recount();
    this.render();
  }

  private recount(): void {
    this.counts = { pending: 0, accepted: 0, rejected: 0 };
    for (const row of this.rows) this.counts[row.status] += 1;
  }

  decide(questionId: string, verdict: "accept" | "reject" | "edit", editedText?: string): Promise<void> {
    const row = this.rows.find((r) => r.question_id === questionId);
    if (!row) return Promise.resolve();
    return optimistic({
      key: `decision-${questionId}`,
      apply: () => {
        const before = row.status;
        row.status = verdict === "reject" ? "rejected" : "accepted";
        if (editedText !== undefined) row.edited_text = editedText;
        this.recount();
        this.render();
        return before;
      },
      remote: () => this.api.submitDecision(questionId, verdict, { editedText }),
      revert: (before) => {
        row.status = before;
        this.recount();
        this.render();
      },
      onError: (error) => {
        if (error instanceof ApiError && error.status === 409) {
          this.callbacks.onConflict?.(questionId);
        } else {
          this.callbacks.onError?.(error.message);
        }
      },
    });
  }

  render(): void {
    this.element.innerHTML = "";
    const counts = document.createElement("p");
    counts.id = "running-counts";
    counts.textContent =
      `pending ${this.counts.pending} / accepted ${this.counts.accepted}` +
      ` / rejected ${this.counts.rejected}`;
    this.element.appendChild(counts);
    this.element.appendChild(this.dashboard());
    const list = document.createElement("ul");
    list.className = "pending-list";
    for (const row of this.rows.filter((r) => r.status === "pending")) {
      const entry = document.createElement("li");
      entry.dataset.questionId = row.question_id;
      entry.tabIndex = 0;
      const text = document.createElement("span");
      text.textContent = row.question_text;
      entry.appendChild(text);
      for (const verdict of ["accept", "reject"] as const) {
        const button = document.createElement("button");
        button.type = "button";
        button.className = verdict;
        button.textContent = verdict;
        button.onclick = () => void this.decide(row.question_id, verdict);
        entry.appendChild(button);
      }
      const edit = document.createElement("button");
      edit.type = "button";
      edit.className = "edit";
      edit.textContent = "edit";
      edit.onclick = () => this.openEditor(entry, row);
      entry.appendChild(edit);
      entry.onkeydown = (event) => {
        if (event.key === "a") void this.decide(row.question_id, "accept");
        if (event.key === "r") void this.decide(row.question_id, "reject");
        if (event.key === "e") this.openEditor(entry, row);
      };
      list.appendChild(entry);
    }
    this.element.appendChild(list);
  }

  /** Inline editor: prefilled input, Enter confirms as an edit verdict. */
  private openEditor(entry: HTMLElement, row: QuestionRow): void {
    if (entry.querySelector("input")) return;
    const input = document.createElement("input");
    input.type = "text";
    input.className = "edit-input";
    input.value = row.question_text;
    input.onkeydown = (event) => {
      event.stopPropagation();
      if (event.key === "Enter" && input.value.trim().endsWith("?")) {
        void this.decide(row.question_id, "edit", input.value.trim());
      }
      if (event.key === "Escape") input.remove();
    };
    entry.appendChild(input);
    input.focus();
  }

  private dashboard(): HTMLElement {
    const panel = document.createElement("details");
    panel.className = "stats-dashboard";
    const summary = document.createElement("summary");
    summary.textContent = "Question statistics";
    panel.appendChild(summary);

    const sections = document.createElement("ul");
    sections.className = "section-counts";
    for (const [section, count] of [...sectionCounts(this.rows)].sort()) {
      const entry = document.createElement("li");
      entry.textContent = `${section}: ${count}`;
      sections.appendChild(entry);
    }
    panel.appendChild(sections);

    const prefixes = document.createElement("ul");
    prefixes.className = "prefix-shares";
    for (const [bucket, share] of [...prefixShares(this.rows)].sort((a, b) => b[1] - a[1])) {
      const entry = document.createElement("li");
      entry.textContent = `${bucket}: ${(share * 100).toFixed(0)}%`;
      prefixes.appendChild(entry);
    }
    panel.appendChild(prefixes);
    return panel;
  }
}
