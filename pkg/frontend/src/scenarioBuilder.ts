// Scenario builder: variable table with lower/upper/step bounds, grid
// cardinality preview, submission, and a polling status panel with edit
// and delete actions.

import { Adjustment, ApiError, GatewayClient, JobRecord } from "./api";

export const POLL_INTERVAL_MS = 2000;

export function valueCount(adj: Adjustment): number {
  if (adj.step_pct <= 0 || adj.upper_pct < adj.lower_pct) return 0;
  return Math.round((adj.upper_pct - adj.lower_pct) / adj.step_pct) + 1;
}

function gridContainsZero(adj: Adjustment): boolean {
  if (adj.lower_pct > 0 || adj.upper_pct < 0) return false;
  const offset = -adj.lower_pct / adj.step_pct;
  return Math.abs(offset - Math.round(offset)) < 1e-9;
}

/** Number of scenarios the middleware will run, base included. */
export function gridCardinality(adjustments: Adjustment[]): number {
  const active = adjustments.filter((a) => valueCount(a) > 0);
  if (active.length === 0) return 1;
  const product = active.reduce((n, a) => n * valueCount(a), 1);
  const baseOnGrid = active.every(gridContainsZero);
  return baseOnGrid ? product : product + 1;
}

export class ScenarioBuilder {
  private adjustments: Adjustment[] = [];
  private caseName = "";
  private climate = "ssp245";
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private root: HTMLElement,
    private api: GatewayClient,
    private onFinished?: (job: JobRecord) => void,
  ) {
    this.render();
  }

  setCase(name: string, climate: string, adjustments: Adjustment[]): void {
    this.caseName = name;
    this.climate = climate;
    this.adjustments = adjustments.map((a) => ({ ...a }));
    this.render();
  }

  /** Pre-fill the form from a previously submitted case. */
  async loadCase(name: string): Promise<void> {
    const detail = await this.api.caseDetail(name);
    this.setCase(detail.config.case_name, detail.config.climate_file, detail.config.adjustments);
  }

  addVariable(key: string): void {
    if (this.adjustments.some((a) => a.key === key)) return;
    this.adjustments.push({ key, lower_pct: 0, upper_pct: 0, step_pct: 10 });
    this.render();
  }

  setBounds(key: string, lower: number, upper: number, step: number): void {
    const adj = this.adjustments.find((a) => a.key === key);
    if (!adj) return;
    adj.lower_pct = lower;
    adj.upper_pct = upper;
    adj.step_pct = step;
    this.render();
  }

  async submit(): Promise<JobRecord | null> {
    this.clearError();
    try {
      const { job } = await this.api.submitCase({
        case_name: this.caseName,
        climate_file: this.climate,
        adjustments: this.adjustments,
      });
      this.startPolling();
      this.renderStatus(job);
      return job;
    } catch (err) {
      this.showError(err);
      return null;
    }
  }

  async edit(): Promise<JobRecord | null> {
    this.clearError();
    try {
      const { job } = await this.api.editCase(this.caseName, this.adjustments, this.climate);
      this.startPolling();
      this.renderStatus(job);
      return job;
    } catch (err) {
      this.showError(err);
      return null;
    }
  }

  async delete(): Promise<void> {
    this.clearError();
    try {
      await this.api.deleteCase(this.caseName);
      this.stopPolling();
      this.renderStatus(null);
    } catch (err) {
      this.showError(err);
    }
  }

  private startPolling(): void {
    this.stopPolling();
    this.pollTimer = setInterval(() => void this.poll(), POLL_INTERVAL_MS);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) clearInterval(this.pollTimer);
    this.pollTimer = null;
  }

  async poll(): Promise<void> {
    try {
      const job = await this.api.caseStatus(this.caseName);
      this.renderStatus(job);
      if (job.status === "finished" || job.status === "failed") {
        this.stopPolling();
        this.onFinished?.(job);
      }
    } catch {
      this.stopPolling();
    }
  }

  private showError(err: unknown): void {
    const box = this.root.querySelector<HTMLElement>(".builder-error");
    if (!box) return;
    box.textContent = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    box.hidden = false;
  }

  private clearError(): void {
    const box = this.root.querySelector<HTMLElement>(".builder-error");
    if (box) {
      box.textContent = "";
      box.hidden = true;
    }
  }

  private renderStatus(job: JobRecord | null): void {
    const panel = this.root.querySelector<HTMLElement>(".status-panel");
    if (!panel) return;
    if (job === null) {
      panel.textContent = "";
      return;
    }
    panel.innerHTML = "";
    const line = document.createElement("div");
    line.className = `job job-${job.status}`;
    line.textContent = `${job.case_name}: ${job.status} (${job.completed}/${job.total})`;
    if (job.status === "failed" && job.failed_scenario) {
      line.textContent += ` — failed on ${job.failed_scenario}`;
    }
    panel.appendChild(line);
  }

  private render(): void {
    this.root.innerHTML = `
      <div class="builder">
        <label>Case <input class="case-name" value="${this.caseName}"></label>
        <label>Climate <input class="climate" value="${this.climate}"></label>
        <table class="variable-table">
          <thead><tr><th>Variable</th><th>Lower %</th><th>Upper %</th><th>Step %</th></tr></thead>
          <tbody></tbody>
        </table>
        <p class="grid-preview"></p>
        <button class="submit-case">Create scenario</button>
        <div class="builder-error" hidden></div>
        <div class="status-panel"></div>
      </div>`;
    const tbody = this.root.querySelector("tbody")!;
    for (const adj of this.adjustments) {
      const tr = document.createElement("tr");
      tr.dataset.key = adj.key;
      tr.innerHTML =
        `<td>${adj.key}</td>` +
        `<td><input class="lower" value="${adj.lower_pct}"></td>` +
        `<td><input class="upper" value="${adj.upper_pct}"></td>` +
        `<td><input class="step" value="${adj.step_pct}"></td>`;
      tbody.appendChild(tr);
    }
    const preview = this.root.querySelector<HTMLElement>(".grid-preview")!;
    preview.textContent = `${gridCardinality(this.adjustments)} scenarios will be simulated`;
    this.root.querySelector<HTMLButtonElement>(".submit-case")!.addEventListener("click", () => {
      this.caseName = this.root.querySelector<HTMLInputElement>(".case-name")!.value;
      this.climate = this.root.querySelector<HTMLInputElement>(".climate")!.value;
      void this.submit();
    });
  }
}
