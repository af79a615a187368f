import { beforeEach, describe, expect, it } from "vitest";
import { INDEX_NAMES, IndicesView } from "../src/views/indices";
import { indexEntry } from "./helpers";

let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.appendChild(root);
});

function pathYs(path: SVGPathElement): number[] {
  // d3.line() emits "M x,y L x,y ..."; pull every y coordinate
  const d = path.getAttribute("d")!;
  return Array.from(d.matchAll(/[ML]?(-?[\d.]+),(-?[\d.]+)/g)).map((m) => Number(m[2]));
}

describe("IndicesView", () => {
  it("draws the base polyline flat at the zero line on every axis", () => {
    const view = new IndicesView(root);
    view.render(
      [indexEntry("ssp245_base", {}), indexEntry("ssp245_101010", { ag_gw_reliance: -0.2 })],
      "ssp245_base",
    );
    const base = root.querySelector<SVGGElement>(".polyline.base")!;
    const ys = pathYs(base.querySelector("path")!);
    expect(ys.length).toBe(INDEX_NAMES.length);
    for (const y of ys) expect(y).toBeCloseTo(ys[0], 9);
  });

  it("renders one axis per index", () => {
    new IndicesView(root).render([indexEntry("ssp245_base", {})], "ssp245_base");
    expect(root.querySelectorAll(".axis").length).toBe(10);
    const labels = Array.from(root.querySelectorAll(".axis-label")).map((l) => l.textContent);
    expect(labels).toEqual([...INDEX_NAMES]);
  });

  it("hides non-matching polylines when an axis is brushed, base stays visible", () => {
    const view = new IndicesView(root);
    view.render(
      [
        indexEntry("ssp245_base", {}),
        indexEntry("ssp245_101010", { ag_gw_reliance: -0.2 }),
        indexEntry("ssp245_201010", { ag_gw_reliance: 0.3 }),
      ],
      "ssp245_base",
    );
    view.brushAxis("ag_gw_reliance", -0.05, 0.5);

    const byName = (s: string) => root.querySelector<SVGGElement>(`.polyline[data-scenario="${s}"]`)!;
    expect(byName("ssp245_101010").classList.contains("hidden")).toBe(true);
    expect(byName("ssp245_201010").classList.contains("hidden")).toBe(false);
    // base sits at delta 0, inside the brush
    expect(byName("ssp245_base").classList.contains("hidden")).toBe(false);

    view.clearBrush("ag_gw_reliance");
    expect(byName("ssp245_101010").classList.contains("hidden")).toBe(false);
  });

  it("renders flagged indices as gap markers with an undefined tooltip", () => {
    new IndicesView(root).render(
      [indexEntry("ssp245_101010", { renewable_share: 0.1 }, ["ag_water_impact"])],
      "ssp245_base",
    );
    const marker = root.querySelector<SVGCircleElement>(".gap-marker")!;
    expect(marker.getAttribute("data-index")).toBe("ag_water_impact");
    expect(marker.querySelector("title")!.textContent).toBe("ag_water_impact: undefined (0/0)");
    // the polyline is split around the gap
    const g = root.querySelector<SVGGElement>(`.polyline[data-scenario="ssp245_101010"]`)!;
    expect(g.querySelectorAll("path").length).toBe(2);
  });
});
