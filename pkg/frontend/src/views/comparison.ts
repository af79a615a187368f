// Cross-scenario comparison: connected-dot plot of percent differences
// vs the base scenario, one row per branch node, on a zoomable axis.
// Differences beyond the axis clamp to the edge with an overflow marker.

import * as d3 from "d3";
import { ComparePayload } from "../api";
import { scenarioColor } from "../color";

export interface DotPlacement {
  scenario: string;
  pct: number | null;
  clamped: number;
  overflow: boolean;
}

export function placeDots(row: { scenarios: { name: string; pct_diff: number | null }[] }, scalePct: number): DotPlacement[] {
  return row.scenarios.map((s) => {
    const pct = s.pct_diff;
    const clamped = pct === null ? 0 : Math.max(-scalePct, Math.min(scalePct, pct));
    return {
      scenario: s.name,
      pct,
      clamped,
      overflow: pct !== null && Math.abs(pct) > scalePct,
    };
  });
}

const WIDTH = 640;
const ROW_HEIGHT = 28;
const LABEL_WIDTH = 220;

export class ComparisonView {
  constructor(
    private root: HTMLElement,
    private onDotClick?: (scenario: string, branch: string) => void,
  ) {}

  render(payload: ComparePayload, scalePct: number): void {
    this.root.innerHTML = "";
    const names = payload.rows.flatMap((r) => r.scenarios.map((s) => s.name));
    const x = d3
      .scaleLinear()
      .domain([-scalePct, scalePct])
      .range([LABEL_WIDTH, WIDTH - 16]);

    const svg = d3
      .select(this.root)
      .append("svg")
      .attr("class", "connected-dot")
      .attr("width", WIDTH)
      .attr("height", (payload.rows.length + 1) * ROW_HEIGHT);

    // axis with the zero line
    svg
      .append("line")
      .attr("class", "zero-line")
      .attr("x1", x(0))
      .attr("x2", x(0))
      .attr("y1", 0)
      .attr("y2", payload.rows.length * ROW_HEIGHT)
      .attr("stroke", "#bbb");

    payload.rows.forEach((row, i) => {
      const y = i * ROW_HEIGHT + ROW_HEIGHT / 2;
      const g = svg.append("g").attr("class", "row").attr("data-branch", row.branch);
      g.append("text")
        .attr("x", 4)
        .attr("y", y + 4)
        .attr("class", "row-label")
        .text(row.label);

      const dots = placeDots(row, scalePct);
      const xs = dots.map((d) => x(d.clamped));
      if (xs.length > 1) {
        g.append("line")
          .attr("class", "connector")
          .attr("x1", Math.min(...xs))
          .attr("x2", Math.max(...xs))
          .attr("y1", y)
          .attr("y2", y)
          .attr("stroke", "#888");
      }
      for (const dot of dots) {
        const cx = x(dot.clamped);
        const circle = g
          .append("circle")
          .attr("class", dot.overflow ? "dot overflow" : "dot")
          .attr("data-scenario", dot.scenario)
          .attr("data-pct", dot.pct === null ? "" : String(dot.pct))
          .attr("cx", cx)
          .attr("cy", y)
          .attr("r", 6)
          .attr("fill", scenarioColor(dot.scenario, names));
        circle.append("title").text(`${dot.scenario}: ${dot.pct === null ? "n/a" : dot.pct.toFixed(1) + "%"}`);
        circle.on("click", () => this.onDotClick?.(dot.scenario, row.branch));
        if (dot.overflow) {
          // arrowhead at the clipped edge pointing outward
          const dir = dot.pct !== null && dot.pct > 0 ? 1 : -1;
          g.append("path")
            .attr("class", "overflow-marker")
            .attr("data-scenario", dot.scenario)
            .attr("d", `M ${cx + dir * 8} ${y} l ${-dir * 6} -4 l 0 8 z`)
            .attr("fill", "#333");
        }
      }
    });
  }
}
