/** Thin typed client for the review-service API. */

import type {
  AgreementRow,
  DistributionReport,
  QuestionPage,
  Responses,
  Scheme,
  SweepPoint,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = (await response.json()).detail ?? detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  getScheme(): Promise<Scheme> {
    return this.request<Scheme>("/api/scheme");
  }

  listQuestions(params: {
    book?: string;
    status?: string;
    page?: number;
    pageSize?: number;
    shuffleSeed?: number;
  }): Promise<QuestionPage> {
    const query = new URLSearchParams();
    if (params.book) query.set("book", params.book);
    if (params.status) query.set("status", params.status);
    if (params.page) query.set("page", String(params.page));
    if (params.pageSize) query.set("page_size", String(params.pageSize));
    if (params.shuffleSeed !== undefined) query.set("shuffle_seed", String(params.shuffleSeed));
    return this.request<QuestionPage>(`/api/questions?${query}`);
  }

  submitDecision(
    questionId: string,
    verdict: "accept" | "reject" | "edit",
    options: { editedText?: string; force?: boolean; authorId?: string } = {},
  ): Promise<void> {
    return this.request<void>(`/api/questions/${questionId}/decision`, {
      method: "POST",
      body: JSON.stringify({
        author_id: options.authorId ?? "ui",
        verdict,
        edited_text: options.editedText ?? null,
        force: options.force ?? false,
      }),
    });
  }

  submitAnnotation(questionId: string, raterId: string, responses: Responses): Promise<void> {
    return this.request<void>(`/api/questions/${questionId}/annotations`, {
      method: "POST",
      body: JSON.stringify({ rater_id: raterId, responses, ts: Date.now() / 1000 }),
    });
  }

  listAnnotations(questionId: string): Promise<{ annotations: { responses: Responses }[] }> {
    return this.request(`/api/questions/${questionId}/annotations`);
  }

  sweep(bookId: string, thresholds: number[]): Promise<{ points: SweepPoint[] }> {
    return this.request(`/api/books/${bookId}/sweep`, {
      method: "POST",
      body: JSON.stringify({ thresholds }),
    });
  }

  agreement(item: string): Promise<AgreementRow> {
    return this.request(`/api/reports/agreement?item=${encodeURIComponent(item)}`);
  }

  distribution(): Promise<DistributionReport> {
    return this.request("/api/reports/distribution");
  }
}
