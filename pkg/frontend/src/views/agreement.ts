/** Agreement dashboard: one row per scheme item, IAA-table shaped. */

import { ApiClient } from "../api.js";
import type { AgreementRow, Scheme } from "../types.js";

const COLUMNS = ["item", "%-agreement", "alpha", "CI lower", "CI upper", "most frequent"];

export class AgreementDashboard {
  readonly element: HTMLTableElement;

  constructor(
    private api: ApiClient,
    private scheme: Scheme,
  ) {
    this.element = document.createElement("table");
    this.element.id = "agreement-table";
  }

  async load(): Promise<void> {
    const rows: AgreementRow[] = [];
    for (const item of this.scheme.items) {
      try {
        rows.push(await this.api.agreement(item.id));
      } catch {
        // Item without pairable data yet; leave it out of the table.
      }
    }
    this.render(rows);
  }

  render(rows: AgreementRow[]): void {
    this.element.innerHTML = "";
    const header = this.element.insertRow();
    for (const column of COLUMNS) {
      const cell = document.createElement("th");
      cell.textContent = column;
      header.appendChild(cell);
    }
    for (const row of rows) {
      const tr = this.element.insertRow();
      tr.insertCell().textContent = row.item;
      tr.insertCell().textContent = row.percent_agreement.toFixed(2);
      tr.insertCell().textContent = row.alpha.toFixed(2);
      tr.insertCell().textContent = row.ci_lower === null ? "-" : row.ci_lower.toFixed(2);
      tr.insertCell().textContent = row.ci_upper === null ? "-" : row.ci_upper.toFixed(2);
      tr.insertCell().textContent = row.most_frequent_share.toFixed(2);
    }
  }
}
