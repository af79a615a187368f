// Colorblind-safe categorical palette (Okabe-Ito). A branch takes the
// color of its first-level node under the sector root, so child branches
// always inherit their parent's color.

const PALETTE = [
  "#E69F00",
  "#56B4E9",
  "#009E73",
  "#F0E442",
  "#0072B2",
  "#D55E00",
  "#CC79A7",
  "#999999",
];

const assigned = new Map<string, string>();

function colorKey(branchId: string): string {
  const parts = branchId.split("/");
  return parts.slice(0, Math.min(2, parts.length)).join("/");
}

export function colorFor(branchId: string): string {
  const key = colorKey(branchId);
  let color = assigned.get(key);
  if (color === undefined) {
    color = PALETTE[assigned.size % PALETTE.length];
    assigned.set(key, color);
  }
  return color;
}

export function scenarioColor(name: string, ordered: string[]): string {
  // WUE-grouped families: scenarios sharing the first delta group share a hue
  const group = name.includes("_") ? name.split("_")[1].slice(0, 2) : name;
  const groups = Array.from(new Set(ordered.map((n) => (n.includes("_") ? n.split("_")[1].slice(0, 2) : n))));
  return PALETTE[Math.max(0, groups.indexOf(group)) % PALETTE.length];
}

export function resetColors(): void {
  assigned.clear();
}
