import { beforeEach, describe, expect, it } from "vitest";
import { TimelineView } from "../src/views/timeline";
import { YEARS, timelinePayload } from "./helpers";

let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.appendChild(root);
});

describe("TimelineView", () => {
  it("shows flat zero difference bars when the scenario equals the base", () => {
    const view = new TimelineView(root);
    const payload = timelinePayload({ same_as_base: YEARS.map((y) => 100 + (y - 2022)) });
    view.render(payload);
    view.select(payload, "same_as_base");
    const bars = root.querySelectorAll<SVGRectElement>(".diff-bar");
    expect(bars.length).toBe(29);
    for (const bar of bars) {
      expect(Number(bar.getAttribute("data-pct"))).toBe(0);
      expect(Number(bar.getAttribute("height"))).toBe(0);
    }
  });

  it("adds and removes scenario lines and legend entries without reload", () => {
    const view = new TimelineView(root);
    const one = timelinePayload({ ssp245_101010: YEARS.map(() => 90) });
    view.render(one);
    expect(root.querySelectorAll(".scenario-line:not(.base)").length).toBe(1);
    expect(root.querySelectorAll(".legend-entry").length).toBe(2); // base + one

    const three = timelinePayload({
      ssp245_101010: YEARS.map(() => 90),
      ssp245_201010: YEARS.map(() => 80),
      ssp245_301010: YEARS.map(() => 70),
    });
    view.render(three);
    expect(root.querySelectorAll(".scenario-line:not(.base)").length).toBe(3);
    expect(root.querySelectorAll(".legend-entry").length).toBe(4);

    view.render(one);
    expect(root.querySelectorAll(".scenario-line:not(.base)").length).toBe(1);
  });

  it("renders three lines for the three WUE scenarios", () => {
    const view = new TimelineView(root);
    view.render(
      timelinePayload({
        ssp245_101010: YEARS.map((y) => 90 + (y - 2022)),
        ssp245_201010: YEARS.map((y) => 80 + (y - 2022)),
        ssp245_301010: YEARS.map((y) => 70 + (y - 2022)),
      }),
    );
    const lines = root.querySelectorAll<SVGPathElement>(".scenario-line:not(.base)");
    expect(lines.length).toBe(3);
    const names = Array.from(lines).map((l) => l.dataset.scenario);
    expect(names).toEqual(["ssp245_101010", "ssp245_201010", "ssp245_301010"]);
  });

  it("highlights the clicked line and reveals its difference bars", () => {
    const view = new TimelineView(root);
    const payload = timelinePayload({ ssp245_101010: YEARS.map(() => 90) });
    view.render(payload);
    const line = root.querySelector<SVGPathElement>('[data-scenario="ssp245_101010"]')!;
    line.dispatchEvent(new MouseEvent("click"));
    expect(line.classList.contains("highlight")).toBe(true);
    expect(root.querySelector<SVGSVGElement>("svg.diff-bars")!.hasAttribute("hidden")).toBe(false);
    expect(root.querySelectorAll(".diff-bar").length).toBe(29);
  });
});
