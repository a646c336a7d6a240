// Shapes mirroring the service wire formats (see ../docs/schema.md).

export type Datatype =
  | "string"
  | "integer"
  | "decimal"
  | "double"
  | "dateTime"
  | "boolean"
  | "iri";

export type FilterType = "contain" | "match" | "regex" | "range" | "equals";

export type Scalar = string | number | boolean;

export interface FilterSpec {
  type: FilterType;
  text?: string;
  pattern?: string;
  flags?: string;
  min?: Scalar;
  max?: Scalar;
  value?: Scalar;
}

export interface PropertyBinding {
  propertyIri: string;
  label: string;
  datatype: Datatype;
  hidden: boolean;
  optional: boolean;
  filters: FilterSpec[];
}

export interface SensorSelection {
  sensorIri: string;
  label: string;
  properties: PropertyBinding[];
}

export interface GeoCircle {
  centerLatDeg: number;
  centerLonDeg: number;
  radiusMeters: number;
}

export type Combinator = "union" | "intersection";

export interface QueryDocument {
  version: string;
  limit: number;
  sensors: SensorSelection[];
  geo: { circles: GeoCircle[]; combinator: Combinator };
  dateWindow?: { start?: string; end?: string };
}

export interface CatalogProperty {
  propertyIri: string;
  label: string;
  datatype: Datatype;
  sampleValues: string[];
}

export interface CatalogSensor {
  sensorIri: string;
  label: string;
  properties: CatalogProperty[];
}

export interface Catalog {
  sensors: CatalogSensor[];
  fetchedAt: string;
  sourceUrl: string;
}

export interface TableCell {
  kind: "iri" | "literal" | "blank" | "unbound";
  value?: string;
  datatype?: string;
  lang?: string;
}

export interface ResultTable {
  columns: string[];
  rows: TableCell[][];
}

export interface ChatResponse {
  reply: string;
  query: QueryDocument;
  triggerSearch: boolean;
}

export interface ExampleEntry {
  name: string;
  description: string;
  query: QueryDocument;
}

// Which filter types each datatype admits; mirrors the service's
// validation table so menus never offer an illegal variant.
export const LEGAL_FILTERS: Record<Datatype, FilterType[]> = {
  string: ["contain", "match", "regex", "equals"],
  integer: ["range", "equals"],
  decimal: ["range", "equals"],
  double: ["range", "equals"],
  dateTime: ["range", "equals"],
  boolean: ["equals"],
  iri: ["equals", "match"],
};
