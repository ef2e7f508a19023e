/** Fixed categorical palette; the service caps schemas at 10 classes. */
export const LABEL_PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
] as const;

export function labelColor(label: number): string {
  return LABEL_PALETTE[label % LABEL_PALETTE.length];
}

/** Translucent row wash so cell shading stays readable on top. */
export function labelWash(label: number): string {
  return labelColor(label) + "22";
}
