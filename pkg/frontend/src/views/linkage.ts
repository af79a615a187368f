// Coupled-model variable exploration: per-branch composition panel with
// input-resource stacked bars, a log-normalized value bar, an inline
// annual line with a marker at the selected year, and an output stacked
// bar. Re-renders on year-slider or resource-filter changes.

import * as d3 from "d3";
import { CompositionPayload, GatewayClient, TimeseriesPayload } from "../api";
import { colorFor } from "../color";

const BAR_WIDTH = 320;
const LINE_WIDTH = 320;
const LINE_HEIGHT = 60;

export function stackedSegments(fractions: Record<string, number>): { id: string; pct: number }[] {
  return Object.entries(fractions)
    .sort((a, b) => b[1] - a[1])
    .map(([id, f]) => ({ id, pct: f * 100 }));
}

/** Log-normalized bar width so branches spanning magnitudes stay visible. */
export function logWidth(value: number, maxValue: number, fullWidth = BAR_WIDTH): number {
  if (value <= 0 || maxValue <= 0) return 0;
  return (Math.log1p(value) / Math.log1p(maxValue)) * fullWidth;
}

export class LinkageView {
  private year: number;
  private resource: string | null = null;

  constructor(
    private root: HTMLElement,
    private api: GatewayClient,
    private scenario: string,
    private branch: string,
    year: number,
  ) {
    this.year = year;
  }

  async setYear(year: number): Promise<void> {
    this.year = year;
    await this.refresh();
  }

  async setResource(resource: string | null): Promise<void> {
    this.resource = resource;
    await this.refresh();
  }

  async setBranch(branch: string): Promise<void> {
    this.branch = branch;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    const [composition, series] = await Promise.all([
      this.api.composition(this.scenario, this.branch, this.year),
      this.api.timeseries(this.scenario, this.branch, {
        resource: this.resource ?? undefined,
      }),
    ]);
    this.renderPanel(composition, series);
  }

  private renderPanel(composition: CompositionPayload, series: TimeseriesPayload): void {
    this.root.innerHTML = `
      <div class="linkage-panel" data-branch="${this.branch}" data-year="${this.year}">
        <h3 class="panel-title">${this.branch}</h3>
        <div class="input-bar"></div>
        <svg class="inline-line" width="${LINE_WIDTH}" height="${LINE_HEIGHT}"></svg>
        <div class="output-bar"></div>
      </div>`;

    this.renderStack(this.root.querySelector<HTMLElement>(".input-bar")!, composition.input_fractions, composition.inputs);
    this.renderStack(this.root.querySelector<HTMLElement>(".output-bar")!, composition.output_fractions, composition.outputs);
    this.renderLine(series);
  }

  private renderStack(container: HTMLElement, fractions: Record<string, number>, values: Record<string, number>): void {
    const segments = stackedSegments(fractions);
    if (segments.length === 0) {
      container.innerHTML = `<span class="empty-placeholder">no flows</span>`;
      return;
    }
    for (const seg of segments) {
      const div = document.createElement("div");
      div.className = "stack-segment";
      div.dataset.id = seg.id;
      div.dataset.pct = seg.pct.toFixed(6);
      div.style.width = `${(seg.pct / 100) * BAR_WIDTH}px`;
      div.style.background = colorFor(seg.id);
      div.title = `${seg.id}: ${seg.pct.toFixed(1)}% (${values[seg.id]?.toExponential(3)})`;
      container.appendChild(div);
    }
  }

  private renderLine(series: TimeseriesPayload): void {
    const svg = d3.select(this.root).select<SVGSVGElement>("svg.inline-line");
    const years = series.years;
    if (years.length === 0) return;
    const x = d3
      .scaleLinear()
      .domain([years[0], years[years.length - 1]])
      .range([4, LINE_WIDTH - 4]);
    const maxV = d3.max(series.values) ?? 1;
    const y = d3
      .scaleLinear()
      .domain([0, maxV])
      .range([LINE_HEIGHT - 4, 4]);
    const line = d3
      .line<number>()
      .x((_, i) => x(years[i]))
      .y((v) => y(v));
    svg
      .append("path")
      .attr("class", "value-line")
      .attr("fill", "none")
      .attr("stroke", colorFor(this.branch))
      .attr("d", line(series.values));

    const yi = years.indexOf(this.year);
    if (yi >= 0) {
      svg
        .append("circle")
        .attr("class", "year-marker")
        .attr("data-year", this.year)
        .attr("cx", x(this.year))
        .attr("cy", y(series.values[yi]))
        .attr("r", 4)
        .append("title")
        .text(`${this.year}: ${series.values[yi].toExponential(3)} ${series.unit}`);
    }
  }
}
