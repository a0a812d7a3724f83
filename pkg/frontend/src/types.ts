/** Wire types of the review-service JSON API. */

export interface SchemeItem {
  id: string;
  group: number;
  choices: string[];
  is_gate: boolean;
}

export interface Scheme {
  items: SchemeItem[];
}

export interface QuestionRow {
  question_id: string;
  book_id: string;
  paragraph_id: string;
  sentence_id: string;
  sentence_text: string;
  answer_text: string;
  answer_token_ids: number[];
  pattern_id: string;
  question_text: string;
  generator_id: string;
  score: number;
  status: "pending" | "accepted" | "rejected";
  edited_text: string | null;
  context_paragraph: string;
}

export interface QuestionPage {
  questions: QuestionRow[];
  total: number;
  page: number;
  page_size: number;
}

export interface SweepPoint {
  threshold: number;
  count: number;
}

export interface AgreementRow {
  item: string;
  percent_agreement: number;
  alpha: number;
  ci_lower: number | null;
  ci_upper: number | null;
  most_frequent_share: number;
  n_applicable: number;
  n_total: number;
}

export type Responses = Record<string, string>;

export interface DistributionEntry {
  labels: Record<string, { relative: number; absolute: number }>;
  n_applicable: number;
  n_total: number;
}

export type DistributionReport = Record<string, DistributionEntry>;
