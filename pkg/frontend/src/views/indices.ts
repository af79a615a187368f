// Sustainability indices: parallel-coordinates plot with one axis per
// index and one polyline per scenario, drawn as proportional differences
// vs the base scenario (so the base polyline sits at zero on every axis).
// Flagged (0/0) indices render as gaps. Axis brushes filter polylines.

import * as d3 from "d3";
import { IndexEntry } from "../api";
import { scenarioColor } from "../color";

export const INDEX_NAMES = [
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
] as const;

const WIDTH = 900;
const HEIGHT = 280;
const MARGIN = { top: 30, bottom: 16 };

interface Brush {
  axis: string;
  min: number;
  max: number;
}

export class IndicesView {
  private brushes: Brush[] = [];
  private entries: IndexEntry[] = [];

  constructor(private root: HTMLElement) {}

  render(entries: IndexEntry[], baseName: string): void {
    this.entries = entries;
    this.root.innerHTML = "";
    const svg = d3
      .select(this.root)
      .append("svg")
      .attr("class", "parallel-coords")
      .attr("width", WIDTH)
      .attr("height", HEIGHT);

    const x = d3
      .scalePoint<string>()
      .domain([...INDEX_NAMES])
      .range([60, WIDTH - 30]);

    const extent = Math.max(
      0.1,
      ...entries.flatMap((e) => INDEX_NAMES.map((n) => Math.abs(e.deltas?.[n] ?? 0))),
    );
    const y = d3
      .scaleLinear()
      .domain([-extent, extent])
      .range([HEIGHT - MARGIN.bottom, MARGIN.top]);

    for (const name of INDEX_NAMES) {
      const g = svg.append("g").attr("class", "axis").attr("data-index", name);
      g.append("line")
        .attr("x1", x(name)!)
        .attr("x2", x(name)!)
        .attr("y1", MARGIN.top)
        .attr("y2", HEIGHT - MARGIN.bottom)
        .attr("stroke", "#999");
      g.append("text")
        .attr("x", x(name)!)
        .attr("y", MARGIN.top - 14)
        .attr("text-anchor", "middle")
        .attr("class", "axis-label")
        .text(name);
    }

    const names = entries.map((e) => e.scenario);
    for (const entry of entries) {
      const isBase = entry.scenario === baseName;
      const g = svg
        .append("g")
        .attr("class", isBase ? "polyline base" : "polyline")
        .attr("data-scenario", entry.scenario);

      // split the polyline into segments around flagged gaps
      let segment: [number, number][] = [];
      const flush = () => {
        if (segment.length > 1) {
          g.append("path")
            .attr("class", "polyline-path")
            .attr("fill", "none")
            .attr("stroke", isBase ? "#000" : scenarioColor(entry.scenario, names))
            .attr("stroke-width", isBase ? 2 : 1.25)
            .attr("d", d3.line()(segment)!);
        }
        segment = [];
      };
      for (const name of INDEX_NAMES) {
        const delta = isBase ? 0 : (entry.deltas?.[name] ?? null);
        const flagged = entry.flagged[name] || delta === null;
        if (flagged && !isBase) {
          flush();
          g.append("circle")
            .attr("class", "gap-marker")
            .attr("data-index", name)
            .attr("cx", x(name)!)
            .attr("cy", y(0))
            .attr("r", 3)
            .append("title")
            .text(`${name}: undefined (0/0)`);
        } else {
          segment.push([x(name)!, y(delta ?? 0)]);
        }
      }
      flush();
      g.selectAll<SVGPathElement, unknown>("path").append("title").text(entry.scenario);
    }
    this.applyBrushes();
  }

  /** Filter polylines to those whose delta on `axis` lies inside [min, max]. */
  brushAxis(axis: string, min: number, max: number): void {
    this.brushes = this.brushes.filter((b) => b.axis !== axis);
    this.brushes.push({ axis, min, max });
    this.applyBrushes();
  }

  clearBrush(axis?: string): void {
    this.brushes = axis === undefined ? [] : this.brushes.filter((b) => b.axis !== axis);
    this.applyBrushes();
  }

  private matches(entry: IndexEntry, baseName: string | null): boolean {
    for (const b of this.brushes) {
      const delta = entry.scenario === baseName ? 0 : (entry.deltas?.[b.axis] ?? null);
      if (delta === null || delta < b.min || delta > b.max) return false;
    }
    return true;
  }

  private applyBrushes(): void {
    const base = this.root.querySelector<SVGGElement>(".polyline.base")?.dataset.scenario ?? null;
    for (const g of this.root.querySelectorAll<SVGGElement>(".polyline")) {
      const entry = this.entries.find((e) => e.scenario === g.dataset.scenario);
      const visible = entry !== undefined && this.matches(entry, base);
      g.classList.toggle("hidden", !visible);
      g.setAttribute("display", visible ? "inline" : "none");
    }
  }
}
