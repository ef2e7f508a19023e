/** Shapes of the service JSON payloads, mirrored field for field. */

export interface NumericCondition {
  kind: "numeric";
  lower: number | null;
  upper: number | null;
  lower_q: number;
  upper_q: number;
}

export interface CategoricalCondition {
  kind: "categorical";
  categories: string[];
  indices: number[];
}

export type Condition = NumericCondition | CategoricalCondition;

export interface RuleRow {
  id: number;
  parent: number | null;
  label: number;
  label_name: string;
  weight: number;
  conditions: Record<string, Condition>;
  coverage: number;
  confidence: number;
  anomaly: number;
  neighborhood_size: number;
}

export interface AttributeColumn {
  name: string;
  kind: "numeric" | "categorical";
  usage: number;
  rule_counts: Record<string, number>;
  page: number;
}

export interface Boundary {
  attribute: string;
  groups: number[][];
}

export interface LevelMetrics {
  fidelity_train: number;
  fidelity_test: number;
  average_anomaly: number;
  objective: number;
  margin: number;
  tradeoff: number;
}

export interface LevelPayload {
  depth: number;
  budget_used: number;
  neighborhood_size: number;
  scope_size: number;
  rules: RuleRow[];
  row_order: number[];
  attributes: AttributeColumn[];
  attribute_order: string[];
  pinned: string[];
  arrows: string[];
  boundaries: Boundary[];
  sort_mode: string;
  metrics: LevelMetrics;
}

export interface NumericDistribution {
  kind: "numeric";
  bin_edges: number[];
  covered: number[];
  training: number[];
}

export interface CategoricalDistribution {
  kind: "categorical";
  categories: string[];
  covered: number[];
  training: number[];
}

export type Distribution = NumericDistribution | CategoricalDistribution;

export interface RuleDetail {
  id: number;
  label: number;
  label_name: string;
  conditions: Record<string, Condition>;
  coverage: number;
  confidence: number;
  anomaly: number;
  covered_sample_ids: number[];
  distributions: Record<string, Distribution>;
}

export interface Predicate {
  attribute: string;
  lower?: number;
  upper?: number;
  categories?: string[];
}

export interface FilterResult {
  before: Record<string, number>;
  after: Record<string, number>;
  matching_sample_ids: number[];
}

export interface SampleRecord {
  id: number;
  values: Record<string, unknown>;
  label: string;
  split: string;
}

export interface SamplesPage {
  total: number;
  page: number;
  page_size: number;
  rows: SampleRecord[];
}

export interface LevelInfo {
  depth: number;
  displayed_rules: number;
  rule_counts: Record<string, number>;
  covered_samples: Record<string, number>;
  scope_size: number;
  mean_confidence: number;
  mean_anomaly: number;
}

export type OrderMode = "metric" | "group" | "reorder";

export interface OrderRequest {
  mode: OrderMode;
  metric?: "coverage" | "confidence" | "anomaly";
  direction?: "asc" | "desc";
  attribute?: string;
  attributes?: string[];
  pinned?: string[];
  tau?: number;
}

export interface SessionOptions {
  model?: string;
  data?: string;
  schema?: string;
  format?: string;
  budget?: number;
  margin?: number;
  tradeoff?: number;
}

export interface SamplesQuery {
  sort?: string;
  dir?: "asc" | "desc";
  page?: number;
}

export interface HealthModel {
  kind: string;
  trees: number;
  rules: number;
  classes: string[];
  attributes: number;
  samples: number;
}

export interface Health {
  status: string;
  model: HealthModel | null;
}
