// Single-owner view state shared by the four analysis views.

export const HORIZON_START = 2022;
export const HORIZON_END = 2050;

export interface ViewState {
  selectedCase: string | null;
  scenario: string | null;
  baseScenario: string;
  year: number;
  expandedPaths: Record<string, Set<string>>; // per sector
  comparisonScenarios: string[];
  resourceFilter: string | null;
  zoomScalePct: number; // half-width of the percent-difference axis
}

export function defaultState(climate = "ssp245"): ViewState {
  return {
    selectedCase: null,
    scenario: null,
    baseScenario: `${climate}_base`,
    year: HORIZON_START,
    expandedPaths: { water: new Set(), energy: new Set(), food: new Set() },
    comparisonScenarios: [],
    resourceFilter: null,
    zoomScalePct: 100,
  };
}

export function clampYear(year: number): number {
  return Math.min(HORIZON_END, Math.max(HORIZON_START, Math.round(year)));
}

export function setYear(state: ViewState, year: number): ViewState {
  return { ...state, year: clampYear(year) };
}

export function setBaseScenario(state: ViewState, climate: string): ViewState {
  return { ...state, baseScenario: `${climate}_base` };
}

export function toggleComparison(state: ViewState, scenario: string): ViewState {
  const present = state.comparisonScenarios.includes(scenario);
  return {
    ...state,
    comparisonScenarios: present
      ? state.comparisonScenarios.filter((s) => s !== scenario)
      : [...state.comparisonScenarios, scenario],
  };
}
