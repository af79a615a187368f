// Fetch stubbing for component tests: the UI must only ever display
// values obtained from the API, so every test runs against these routes.

import { vi } from "vitest";
import type { ComparePayload, IndexEntry, TimelinePayload } from "../src/api";

export type Route = (url: URL, init?: RequestInit) => { status?: number; body: unknown };

export interface FetchLog {
  calls: { url: URL; init?: RequestInit }[];
}

export function ok(payload: unknown): { status?: number; body: unknown } {
  return { status: 200, body: { status: "ok", payload } };
}

export function err(code: string, message: string, status: number): { status?: number; body: unknown } {
  return { status, body: { status: "error", error: { code, message } } };
}

/** Install a fetch stub; routes are matched by "<METHOD> <pathname>". */
export function installFetch(routes: Record<string, Route>): FetchLog {
  const log: FetchLog = { calls: [] };
  vi.stubGlobal("fetch", async (input: string | URL, init?: RequestInit) => {
    const url = new URL(String(input), "http://test.local");
    log.calls.push({ url, init });
    const key = `${init?.method ?? "GET"} ${url.pathname}`;
    const route = routes[key];
    if (!route) {
      return {
        status: 404,
        json: async () => ({ status: "error", error: { code: "not_found", message: `no stub for ${key}` } }),
      } as Response;
    }
    const { status = 200, body } = route(url, init);
    return { status, json: async () => body } as Response;
  });
  return log;
}

export const YEARS = Array.from({ length: 29 }, (_, i) => 2022 + i);

export function comparePayload(pcts: Record<string, number | null>, branch = "water/demand"): ComparePayload {
  return {
    base: "ssp245_base",
    branch,
    year: 2030,
    rows: [
      {
        branch,
        label: "Water demand",
        base_value: 1000,
        scenarios: Object.entries(pcts).map(([name, pct]) => ({
          name,
          value: pct === null ? 1000 : 1000 * (1 + pct / 100),
          pct_diff: pct,
        })),
      },
    ],
  };
}

export function timelinePayload(series: Record<string, number[]>): TimelinePayload {
  const base = YEARS.map((y) => 100 + (y - 2022));
  return {
    base: "ssp245_base",
    branch: "water/demand",
    unit: "m3_per_month",
    base_series: { years: YEARS, values: base },
    series: Object.entries(series).map(([name, values]) => ({
      name,
      years: YEARS,
      values,
      pct_diff: values.map((v, i) => (base[i] === 0 ? null : ((v - base[i]) / Math.abs(base[i])) * 100)),
    })),
  };
}

export function indexEntry(
  scenario: string,
  deltas: Record<string, number | null>,
  flagged: string[] = [],
): IndexEntry {
  const names = [
    "regional_gw_reliance",
    "ag_gw_reliance",
    "mi_surface_reliance",
    "district_gw_reliance",
    "district_surface_reliance",
    "renewable_share",
    "import_dependence",
    "ag_water_impact",
    "ag_energy_share",
    "ag_emission_share",
  ];
  const values: Record<string, number | null> = {};
  const flags: Record<string, boolean> = {};
  const fullDeltas: Record<string, number | null> = {};
  for (const n of names) {
    flags[n] = flagged.includes(n);
    values[n] = flags[n] ? null : 0.5;
    fullDeltas[n] = flags[n] ? null : (deltas[n] ?? 0);
  }
  return { scenario, year: 2030, values, flagged: flags, deltas: fullDeltas };
}
