// Typed client for the gateway REST API. Every response uses the common
// envelope; errors carry the server's code/message plus the HTTP status.

export interface VariableDef {
  key: string;
  unit: string;
  kind: string;
  base_value: number | string;
  adjustable: boolean;
  default_delta_pct: number;
}

export interface BranchNode {
  id: string;
  sector: string;
  label: string;
  children: string[];
  variables: VariableDef[];
}

export interface Adjustment {
  key: string;
  lower_pct: number;
  upper_pct: number;
  step_pct: number;
}

export interface CaseConfig {
  case_name: string;
  climate_file: string;
  adjustments: Adjustment[];
}

export interface JobRecord {
  case_name: string;
  status: "queued" | "in_progress" | "finished" | "failed";
  total: number;
  completed: number;
  failed_scenario: string | null;
  error: string | null;
  created_at: number;
  finished_at: number | null;
}

export interface CaseDetail {
  config: CaseConfig;
  job: JobRecord;
  scenarios: string[];
  completed_scenarios: string[];
}

export interface TimeseriesPayload {
  branch: string;
  scenario: string;
  unit: string;
  kind: string;
  resolution: string;
  resource: string | null;
  years: number[];
  months?: number[];
  values: number[];
}

export interface CompositionPayload {
  branch: string;
  scenario: string;
  year: number;
  inputs: Record<string, number>;
  outputs: Record<string, number>;
  input_fractions: Record<string, number>;
  output_fractions: Record<string, number>;
}

export interface CompareDot {
  name: string;
  value: number;
  pct_diff: number | null;
}

export interface CompareRow {
  branch: string;
  label: string;
  base_value: number;
  scenarios: CompareDot[];
}

export interface ComparePayload {
  base: string;
  branch: string;
  year: number;
  rows: CompareRow[];
}

export interface TimelineSeries {
  name: string;
  years: number[];
  values: number[];
  pct_diff: (number | null)[];
}

export interface TimelinePayload {
  base: string;
  branch: string;
  unit: string;
  base_series: { years: number[]; values: number[] };
  series: TimelineSeries[];
}

export interface IndexEntry {
  scenario: string;
  year: number;
  values: Record<string, number | null>;
  flagged: Record<string, boolean>;
  deltas?: Record<string, number | null>;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

interface Envelope<T> {
  status: "ok" | "error";
  payload?: T;
  error?: { code: string; message: string };
}

export class GatewayClient {
  constructor(private baseUrl = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, init);
    const doc = (await resp.json()) as Envelope<T>;
    if (doc.status !== "ok" || doc.payload === undefined) {
      const err = doc.error ?? { code: "unknown", message: "malformed response" };
      throw new ApiError(err.code, err.message, resp.status);
    }
    return doc.payload;
  }

  private get<T>(path: string, params?: Record<string, string | number | undefined>): Promise<T> {
    const search = new URLSearchParams();
    for (const [k, v] of Object.entries(params ?? {})) {
      if (v !== undefined) search.set(k, String(v));
    }
    const qs = search.toString();
    return this.request<T>(qs ? `${path}?${qs}` : path);
  }

  branches(): Promise<{ nodes: BranchNode[] }> {
    return this.get("/api/branches");
  }

  climateFiles(): Promise<string[]> {
    return this.get("/api/climate-files");
  }

  listCases(): Promise<{ case_name: string; job: JobRecord; config: CaseConfig }[]> {
    return this.get("/api/cases");
  }

  caseDetail(name: string): Promise<CaseDetail> {
    return this.get(`/api/cases/${name}`);
  }

  caseStatus(name: string): Promise<JobRecord> {
    return this.get(`/api/cases/${name}/status`);
  }

  submitCase(config: CaseConfig): Promise<{ job: JobRecord; poll: string }> {
    return this.request("/api/cases", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  editCase(name: string, adjustments: Adjustment[], climateFile?: string): Promise<{ job: JobRecord }> {
    return this.request(`/api/cases/${name}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ adjustments, climate_file: climateFile }),
    });
  }

  deleteCase(name: string): Promise<{ deleted: string }> {
    return this.request(`/api/cases/${name}`, { method: "DELETE" });
  }

  timeseries(
    scenario: string,
    branch: string,
    opts: { fromYear?: number; toYear?: number; resource?: string; resolution?: string } = {},
  ): Promise<TimeseriesPayload> {
    return this.get(`/api/scenarios/${scenario}/timeseries`, {
      branch,
      from_year: opts.fromYear,
      to_year: opts.toYear,
      resource: opts.resource,
      resolution: opts.resolution,
    });
  }

  composition(scenario: string, branch: string, year: number): Promise<CompositionPayload> {
    return this.get(`/api/scenarios/${scenario}/composition`, { branch, year });
  }

  compare(base: string, scenarios: string[], branch: string, year: number): Promise<ComparePayload> {
    return this.get("/api/compare", { base, scenarios: scenarios.join(","), branch, year });
  }

  compareTimeline(base: string, scenarios: string[], branch: string): Promise<TimelinePayload> {
    return this.get("/api/compare/timeline", { base, scenarios: scenarios.join(","), branch });
  }

  indices(scenarios: string[], year: number, asDeltas = false): Promise<IndexEntry[]> {
    return this.get("/api/indices", {
      scenarios: scenarios.join(","),
      year,
      as: asDeltas ? "deltas" : undefined,
    });
  }
}
