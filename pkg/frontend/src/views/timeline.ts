// Timeline comparison: one annual line per scenario plus the base;
// selecting a line reveals its year-by-year percent difference vs base.

import * as d3 from "d3";
import { TimelinePayload } from "../api";
import { scenarioColor } from "../color";

const WIDTH = 640;
const HEIGHT = 240;
const MARGIN = { top: 8, right: 16, bottom: 24, left: 56 };

export class TimelineView {
  private selected: string | null = null;

  constructor(private root: HTMLElement) {}

  render(payload: TimelinePayload): void {
    this.root.innerHTML = `
      <div class="timeline">
        <svg class="chart" width="${WIDTH}" height="${HEIGHT}"></svg>
        <div class="legend"></div>
        <svg class="diff-bars" width="${WIDTH}" height="120" hidden></svg>
      </div>`;

    const years = payload.base_series.years;
    const all = [payload.base_series.values, ...payload.series.map((s) => s.values)].flat();
    const x = d3
      .scaleLinear()
      .domain([years[0], years[years.length - 1]])
      .range([MARGIN.left, WIDTH - MARGIN.right]);
    const y = d3
      .scaleLinear()
      .domain([Math.min(0, d3.min(all) ?? 0), d3.max(all) ?? 1])
      .nice()
      .range([HEIGHT - MARGIN.bottom, MARGIN.top]);
    const line = d3
      .line<number>()
      .x((_, i) => x(years[i]))
      .y((v) => y(v));

    const svg = d3.select(this.root).select<SVGSVGElement>("svg.chart");
    const names = payload.series.map((s) => s.name);

    svg
      .append("path")
      .attr("class", "scenario-line base")
      .attr("data-scenario", payload.base)
      .attr("fill", "none")
      .attr("stroke", "#444")
      .attr("stroke-dasharray", "4 3")
      .attr("d", line(payload.base_series.values));

    for (const s of payload.series) {
      svg
        .append("path")
        .attr("class", "scenario-line")
        .attr("data-scenario", s.name)
        .attr("fill", "none")
        .attr("stroke", scenarioColor(s.name, names))
        .attr("d", line(s.values))
        .on("click", () => this.select(payload, s.name));
    }

    const legend = this.root.querySelector<HTMLElement>(".legend")!;
    for (const name of [payload.base, ...names]) {
      const entry = document.createElement("span");
      entry.className = "legend-entry";
      entry.dataset.scenario = name;
      entry.textContent = name;
      entry.addEventListener("click", () => this.select(payload, name));
      legend.appendChild(entry);
    }

    if (this.selected && names.includes(this.selected)) {
      this.select(payload, this.selected);
    }
  }

  select(payload: TimelinePayload, scenario: string): void {
    this.selected = scenario;
    this.root
      .querySelectorAll<SVGPathElement>(".scenario-line")
      .forEach((p) => p.classList.toggle("highlight", p.dataset.scenario === scenario));

    const series = payload.series.find((s) => s.name === scenario);
    const bars = d3.select(this.root).select<SVGSVGElement>("svg.diff-bars");
    const node = bars.node()!;
    if (!series) {
      node.setAttribute("hidden", "");
      return;
    }
    node.removeAttribute("hidden");
    bars.selectAll("*").remove();

    const years = series.years;
    const x = d3
      .scaleLinear()
      .domain([years[0], years[years.length - 1] + 1])
      .range([MARGIN.left, WIDTH - MARGIN.right]);
    const extent = Math.max(1, ...series.pct_diff.map((d) => Math.abs(d ?? 0)));
    const y = d3.scaleLinear().domain([-extent, extent]).range([110, 10]);
    const bw = Math.max(2, (WIDTH - MARGIN.left - MARGIN.right) / years.length - 2);

    series.pct_diff.forEach((d, i) => {
      const v = d ?? 0;
      bars
        .append("rect")
        .attr("class", "diff-bar")
        .attr("data-year", years[i])
        .attr("data-pct", v)
        .attr("x", x(years[i]))
        .attr("width", bw)
        .attr("y", Math.min(y(0), y(v)))
        .attr("height", Math.abs(y(v) - y(0)))
        .attr("fill", v >= 0 ? "#0072B2" : "#D55E00");
    });
  }
}
