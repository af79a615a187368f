import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { GatewayClient } from "../src/api";
import { ScenarioBuilder, gridCardinality } from "../src/scenarioBuilder";
import { err, installFetch, ok } from "./helpers";

let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.appendChild(root);
});

afterEach(() => {
  root.remove();
  vi.unstubAllGlobals();
  vi.useRealTimers();
});

const GRID = [
  { key: "municipal_wue", lower_pct: 0, upper_pct: 30, step_pct: 10 },
  { key: "household_eue", lower_pct: 0, upper_pct: 20, step_pct: 10 },
  { key: "irrigation_ie", lower_pct: 0, upper_pct: 20, step_pct: 10 },
];

describe("grid cardinality", () => {
  it("matches the middleware count for the case-study grid", () => {
    expect(gridCardinality(GRID)).toBe(36);
  });

  it("adds the base scenario when no grid contains zero", () => {
    expect(gridCardinality([{ key: "municipal_wue", lower_pct: 10, upper_pct: 30, step_pct: 10 }])).toBe(4);
  });

  it("is 1 with no adjustments", () => {
    expect(gridCardinality([])).toBe(1);
  });
});

describe("ScenarioBuilder", () => {
  it("previews the scenario count from the entered bounds", () => {
    installFetch({});
    const builder = new ScenarioBuilder(root, new GatewayClient());
    builder.setCase("demo", "ssp245", GRID);
    expect(root.querySelector(".grid-preview")!.textContent).toBe("36 scenarios will be simulated");
  });

  it("surfaces the middleware error on a duplicate case name", async () => {
    installFetch({
      "POST /api/cases": () => err("duplicate_case", "case 'demo' already exists", 409),
    });
    const builder = new ScenarioBuilder(root, new GatewayClient());
    builder.setCase("demo", "ssp245", GRID);
    const job = await builder.submit();
    expect(job).toBeNull();
    const box = root.querySelector<HTMLElement>(".builder-error")!;
    expect(box.hidden).toBe(false);
    expect(box.textContent).toContain("duplicate_case");
    expect(box.textContent).toContain("already exists");
  });

  it("pre-fills prior bounds when editing a finished case", async () => {
    installFetch({
      "GET /api/cases/demo": () =>
        ok({
          config: { case_name: "demo", climate_file: "ssp585", adjustments: GRID },
          job: { case_name: "demo", status: "finished", total: 36, completed: 36 },
          scenarios: [],
          completed_scenarios: [],
        }),
    });
    const builder = new ScenarioBuilder(root, new GatewayClient());
    await builder.loadCase("demo");
    expect(root.querySelector<HTMLInputElement>(".case-name")!.value).toBe("demo");
    expect(root.querySelector<HTMLInputElement>(".climate")!.value).toBe("ssp585");
    const row = root.querySelector<HTMLElement>("tr[data-key=municipal_wue]")!;
    expect(row.querySelector<HTMLInputElement>(".lower")!.value).toBe("0");
    expect(row.querySelector<HTMLInputElement>(".upper")!.value).toBe("30");
    expect(row.querySelector<HTMLInputElement>(".step")!.value).toBe("10");
  });

  it("polls status every 2 s until the job finishes", async () => {
    vi.useFakeTimers();
    let pollCount = 0;
    installFetch({
      "POST /api/cases": () =>
        ok({
          job: { case_name: "demo", status: "in_progress", total: 36, completed: 0 },
          poll: "/api/cases/demo/status",
        }),
      "GET /api/cases/demo/status": () => {
        pollCount += 1;
        return ok({
          case_name: "demo",
          status: pollCount >= 2 ? "finished" : "in_progress",
          total: 36,
          completed: pollCount >= 2 ? 36 : 12,
        });
      },
    });
    const finished = vi.fn();
    const builder = new ScenarioBuilder(root, new GatewayClient(), finished);
    builder.setCase("demo", "ssp245", GRID);
    await builder.submit();

    await vi.advanceTimersByTimeAsync(2000);
    expect(pollCount).toBe(1);
    expect(root.querySelector(".status-panel")!.textContent).toContain("in_progress (12/36)");

    await vi.advanceTimersByTimeAsync(2000);
    expect(pollCount).toBe(2);
    expect(root.querySelector(".status-panel")!.textContent).toContain("finished (36/36)");
    expect(finished).toHaveBeenCalledOnce();

    // polling stops once finished
    await vi.advanceTimersByTimeAsync(6000);
    expect(pollCount).toBe(2);
  });
});
