/**
 * Annotation form with live gating.
 *
 * The rater reads the source paragraph first, then answers the scheme
 * items top to bottom. Answering a gate "no" immediately disables all
 * later items and shows "not applicable"; flipping it back restores the
 * previously entered answers from local state. Keyboard: y/n on binary
 * items, 1..9 selects the nth choice of the item under the cursor.
 */

import { ApiClient } from "../api.js";
import { clearDraft, loadDraft, saveDraft } from "../drafts.js";
import { gatedItemIds, missingItemIds, normalizeResponses } from "../gating.js";
import type { QuestionRow, Responses, Scheme } from "../types.js";

export const HELP_TEXT = [
  "Answer every enabled item from top to bottom.",
  "Good example: 'What is metabolism?' for a sentence defining metabolism: understandable, grammatical, answerable from the paragraph.",
  "Bad example: 'Where do ATP molecules move the ATP molecules to?': not understandable, so later items are not applicable.",
  "A 'no' on an underlined (gate) item marks everything below it as not applicable automatically.",
].join("\n");

export interface AnnotateCallbacks {
  onSubmitted?: () => void;
  onError?: (message: string) => void;
}

export class AnnotationForm {
  /** Answers as entered, including values hidden behind a closed gate. */
  readonly entered: Responses = {};
  private container: HTMLElement;

  constructor(
    private scheme: Scheme,
    private question: QuestionRow,
    private api: ApiClient,
    private raterId: string,
    private callbacks: AnnotateCallbacks = {},
  ) {
    this.container = document.createElement("form");
    this.container.className = "annotation-form";
    Object.assign(this.entered, loadDraft(question.question_id) ?? {});
  }

  get element(): HTMLElement {
    return this.container;
  }

  render(): HTMLElement {
    this.container.innerHTML = "";
    this.container.appendChild(this.contextBlock());
    this.container.appendChild(this.helpBlock());
    const gated = gatedItemIds(this.scheme, this.entered);
    for (const item of this.scheme.items) {
      this.container.appendChild(this.itemBlock(item.id, gated.has(item.id)));
    }
    const submit = document.createElement("button");
    submit.type = "button";
    submit.id = "submit-annotation";
    submit.textContent = "Submit annotation";
    submit.onclick = () => void this.submit();
    this.container.appendChild(submit);
    const validation = document.createElement("p");
    validation.id = "validation-message";
    validation.className = "validation";
    this.container.appendChild(validation);
    return this.container;
  }

  private contextBlock(): HTMLElement {
    const block = document.createElement("section");
    block.className = "context";
    const paragraph = document.createElement("p");
    paragraph.id = "context-paragraph";
    paragraph.textContent = this.question.context_paragraph;
    const question = document.createElement("p");
    question.id = "question-text";
    question.textContent = this.question.question_text;
    block.append(paragraph, question);
    return block;
  }

  private helpBlock(): HTMLElement {
    const details = document.createElement("details");
    details.id = "help-panel";
    const summary = document.createElement("summary");
    summary.textContent = "Instructions";
    const body = document.createElement("pre");
    body.textContent = HELP_TEXT;
    details.append(summary, body);
    return details;
  }

  private itemBlock(itemId: string, isGated: boolean): HTMLElement {
    const item = this.scheme.items.find((i) => i.id === itemId)!;
    const fieldset = document.createElement("fieldset");
    fieldset.id = `item-${item.id}`;
    fieldset.dataset.group = String(item.group);
    fieldset.disabled = isGated;
    if (isGated) fieldset.classList.add("gated");

    const legend = document.createElement("legend");
    legend.textContent = item.id;
    if (item.is_gate) legend.classList.add("gate");
    fieldset.appendChild(legend);

    if (isGated) {
      const note = document.createElement("span");
      note.className = "na-note";
      note.textContent = "not applicable";
      fieldset.appendChild(note);
      return fieldset;
    }
    for (const [index, choice] of item.choices.entries()) {
      const label = document.createElement("label");
      const input = document.createElement("input");
      input.type = "radio";
      input.name = item.id;
      input.value = choice;
      input.checked = this.entered[item.id] === choice;
      input.onchange = () => this.setAnswer(item.id, choice);
      label.append(input, ` ${choice} [${index + 1}]`);
      label.onkeydown = (event) => this.keyHandler(item.id, event);
      fieldset.appendChild(label);
    }
    fieldset.tabIndex = 0;
    fieldset.onkeydown = (event) => this.keyHandler(item.id, event);
    return fieldset;
  }

  private keyHandler(itemId: string, event: KeyboardEvent): void {
    const item = this.scheme.items.find((i) => i.id === itemId)!;
    let choice: string | undefined;
    if (event.key === "y" && item.choices.includes("yes")) choice = "yes";
    if (event.key === "n" && item.choices.includes("no")) choice = "no";
    const digit = Number.parseInt(event.key, 10);
    if (!Number.isNaN(digit) && digit >= 1 && digit <= item.choices.length) {
      choice = item.choices[digit - 1];
    }
    if (choice !== undefined) {
      event.preventDefault();
      this.setAnswer(itemId, choice);
    }
  }

  /** Record an answer and re-render so gating takes effect immediately. */
  setAnswer(itemId: string, choice: string): void {
    this.entered[itemId] = choice;
    saveDraft(this.question.question_id, this.entered);
    this.render();
  }

  /** The record exactly as the server will store it. */
  normalized(): Responses {
    return normalizeResponses(this.scheme, this.entered);
  }

  async submit(): Promise<boolean> {
    const missing = missingItemIds(this.scheme, this.entered);
    const validation = this.container.querySelector<HTMLElement>("#validation-message");
    if (missing.length > 0) {
      if (validation) validation.textContent = `unanswered: ${missing.join(", ")}`;
      return false;
    }
    try {
      await this.api.submitAnnotation(
        this.question.question_id,
        this.raterId,
        this.normalized(),
      );
    } catch (error) {
      this.callbacks.onError?.((error as Error).message);
      return false;
    }
    clearDraft(this.question.question_id);
    this.callbacks.onSubmitted?.();
    return true;
  }
}
