// Application shell: scenario builder on the left, the four analysis
// views on the right, all driven by the shared view state. The year
// slider re-renders every year-scoped view.

import { GatewayClient } from "./api";
import { ScenarioBuilder } from "./scenarioBuilder";
import { ViewState, defaultState, setYear, HORIZON_START, HORIZON_END } from "./state";
import { ComparisonView } from "./views/comparison";
import { IndicesView } from "./views/indices";
import { LinkageView } from "./views/linkage";
import { TimelineView } from "./views/timeline";

const LINKAGE_BRANCHES = ["energy/demand/water_infrastructure", "water/demand", "food/production"];

export class App {
  private state: ViewState = defaultState();
  private api = new GatewayClient();
  private builder: ScenarioBuilder;
  private comparison: ComparisonView;
  private timeline: TimelineView;
  private indices: IndicesView;
  private linkagePanels: LinkageView[] = [];

  constructor(private root: HTMLElement) {
    root.innerHTML = `
      <header>
        <label>Year
          <input type="range" class="year-slider" min="${HORIZON_START}" max="${HORIZON_END}"
                 value="${this.state.year}">
          <span class="year-value">${this.state.year}</span>
        </label>
      </header>
      <aside class="builder-pane"></aside>
      <section class="linkage-pane">
        ${LINKAGE_BRANCHES.map(() => '<div class="linkage-slot"></div>').join("")}
      </section>
      <section class="comparison-pane"></section>
      <section class="timeline-pane"></section>
      <section class="indices-pane"></section>`;

    this.builder = new ScenarioBuilder(root.querySelector(".builder-pane")!, this.api, () => {
      void this.refreshViews();
    });
    this.comparison = new ComparisonView(root.querySelector(".comparison-pane")!, (scenario) => {
      void this.openTimeline(scenario);
    });
    this.timeline = new TimelineView(root.querySelector(".timeline-pane")!);
    this.indices = new IndicesView(root.querySelector(".indices-pane")!);

    root.querySelector<HTMLInputElement>(".year-slider")!.addEventListener("input", (ev) => {
      const year = Number((ev.target as HTMLInputElement).value);
      this.state = setYear(this.state, year);
      root.querySelector(".year-value")!.textContent = String(this.state.year);
      void this.refreshYearViews();
    });
  }

  get scenarioBuilder(): ScenarioBuilder {
    return this.builder;
  }

  async selectScenario(scenario: string): Promise<void> {
    this.state.scenario = scenario;
    this.linkagePanels = [];
    const slots = this.root.querySelectorAll<HTMLElement>(".linkage-slot");
    LINKAGE_BRANCHES.forEach((branch, i) => {
      this.linkagePanels.push(new LinkageView(slots[i], this.api, scenario, branch, this.state.year));
    });
    await this.refreshYearViews();
  }

  async refreshYearViews(): Promise<void> {
    await Promise.all(this.linkagePanels.map((p) => p.setYear(this.state.year)));
    await this.refreshViews();
  }

  async refreshViews(): Promise<void> {
    if (this.state.comparisonScenarios.length > 0) {
      const cmp = await this.api.compare(
        this.state.baseScenario,
        this.state.comparisonScenarios,
        "water/demand",
        this.state.year,
      );
      this.comparison.render(cmp, this.state.zoomScalePct);
      const entries = await this.api.indices(
        [this.state.baseScenario, ...this.state.comparisonScenarios],
        this.state.year,
        true,
      );
      this.indices.render(entries, this.state.baseScenario);
    }
  }

  async openTimeline(scenario: string): Promise<void> {
    const payload = await this.api.compareTimeline(this.state.baseScenario, [scenario], "water/demand");
    this.timeline.render(payload);
    this.timeline.select(payload, scenario);
  }
}

const mount = document.getElementById("app");
if (mount) {
  new App(mount);
}
