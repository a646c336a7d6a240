import { Api } from "./api.js";
import {
  Catalog,
  CatalogSensor,
  Combinator,
  FilterSpec,
  GeoCircle,
  LEGAL_FILTERS,
  PropertyBinding,
  QueryDocument,
  ResultTable,
  SensorSelection,
} from "./types.js";

export interface ChatMessage {
  who: "user" | "bot" | "system";
  text: string;
}

export interface Settings {
  apiBaseUrl: string;
}

export interface UiState {
  catalog: Catalog | null;
  query: QueryDocument;
  lastTable: ResultTable | null;
  lastSparql: string | null;
  chatTranscript: ChatMessage[];
  settings: Settings;
  advancedMode: boolean;
  busy: boolean;
}

export const MAX_RADIUS_METERS = 20_015_087;

export function emptyQuery(limit = 1000): QueryDocument {
  return {
    version: "1",
    limit,
    sensors: [],
    geo: { circles: [], combinator: "union" },
  };
}

function cloneQuery(query: QueryDocument): QueryDocument {
  return JSON.parse(JSON.stringify(query)) as QueryDocument;
}

/** Rebuild with canonical key order so exports and golden docs line up. */
export function canonicalizeQuery(query: QueryDocument): QueryDocument {
  const out: QueryDocument = {
    version: query.version ?? "1",
    limit: query.limit,
    sensors: query.sensors.map((sensor) => ({
      sensorIri: sensor.sensorIri,
      label: sensor.label,
      properties: sensor.properties.map((binding) => ({
        propertyIri: binding.propertyIri,
        label: binding.label,
        datatype: binding.datatype,
        hidden: binding.hidden,
        optional: binding.optional,
        filters: binding.filters.map((f) => canonicalFilter(f)),
      })),
    })),
    geo: {
      circles: query.geo.circles.map((c) => ({
        centerLatDeg: c.centerLatDeg,
        centerLonDeg: c.centerLonDeg,
        radiusMeters: c.radiusMeters,
      })),
      combinator: query.geo.combinator,
    },
  };
  if (query.dateWindow) {
    const window: { start?: string; end?: string } = {};
    if (query.dateWindow.start !== undefined) window.start = query.dateWindow.start;
    if (query.dateWindow.end !== undefined) window.end = query.dateWindow.end;
    out.dateWindow = window;
  }
  return out;
}

function canonicalFilter(f: FilterSpec): FilterSpec {
  switch (f.type) {
    case "contain":
    case "match":
      return { type: f.type, text: f.text };
    case "regex":
      return { type: "regex", pattern: f.pattern, flags: f.flags ?? "" };
    case "range": {
      const out: FilterSpec = { type: "range" };
      if (f.min !== undefined) out.min = f.min;
      if (f.max !== undefined) out.max = f.max;
      return out;
    }
    case "equals":
      return { type: "equals", value: f.value };
  }
}

type Listener = (state: UiState) => void;

/**
 * The centralised store. Form, map, chat, and results panes all render
 * from `state.query`; nothing keeps a private copy, so a chat mutation
 * is immediately the form's state and vice versa.
 */
export class Store {
  api: Api;
  state: UiState;
  private listeners: Listener[] = [];
  private querySeq = 0;
  readonly sessionId: string;

  constructor(api?: Api) {
    this.api = api ?? new Api("");
    this.sessionId = `ui-${Math.random().toString(36).slice(2)}`;
    this.state = {
      catalog: null,
      query: emptyQuery(),
      lastTable: null,
      lastSparql: null,
      chatTranscript: [],
      settings: { apiBaseUrl: this.api.baseUrl },
      advancedMode: false,
      busy: false,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of [...this.listeners]) listener(this.state);
  }

  private setQuery(query: QueryDocument): void {
    this.state = { ...this.state, query: canonicalizeQuery(query) };
    this.emit();
  }

  /** Document as submitted to the API; deep copy in canonical key order. */
  exportDocument(): QueryDocument {
    return canonicalizeQuery(cloneQuery(this.state.query));
  }

  importDocument(raw: unknown): string | null {
    if (typeof raw !== "object" || raw === null) return "not a query document";
    const doc = raw as QueryDocument;
    if (!Array.isArray(doc.sensors) || typeof doc.limit !== "number") {
      return "missing sensors or limit";
    }
    const withDefaults: QueryDocument = {
      ...doc,
      geo: doc.geo ?? { circles: [], combinator: "union" },
    };
    this.setQuery(cloneQuery(withDefaults));
    return null;
  }

  // -- catalog ------------------------------------------------------------

  async loadCatalog(): Promise<void> {
    this.state = { ...this.state, catalog: await this.api.sensors() };
    this.emit();
  }

  setCatalog(catalog: Catalog): void {
    this.state = { ...this.state, catalog };
    this.emit();
  }

  findCatalogSensor(sensorIri: string): CatalogSensor | undefined {
    return this.state.catalog?.sensors.find((s) => s.sensorIri === sensorIri);
  }

  // -- form mutations -----------------------------------------------------

  isSelected(sensorIri: string): boolean {
    return this.state.query.sensors.some((s) => s.sensorIri === sensorIri);
  }

  toggleSensor(sensorIri: string): void {
    if (this.isSelected(sensorIri)) {
      this.setQuery({
        ...this.state.query,
        sensors: this.state.query.sensors.filter((s) => s.sensorIri !== sensorIri),
      });
      return;
    }
    const described = this.findCatalogSensor(sensorIri);
    const selection: SensorSelection = {
      sensorIri,
      label: described?.label ?? sensorIri.split(/[/#]/).pop() ?? sensorIri,
      properties: (described?.properties ?? []).map((p) => ({
        propertyIri: p.propertyIri,
        label: p.label,
        datatype: p.datatype,
        hidden: false,
        optional: false,
        filters: [],
      })),
    };
    this.setQuery({ ...this.state.query, sensors: [...this.state.query.sensors, selection] });
  }

  private updateBinding(
    sensorIri: string,
    propertyIri: string,
    update: (binding: PropertyBinding) => PropertyBinding
  ): void {
    this.setQuery({
      ...this.state.query,
      sensors: this.state.query.sensors.map((sensor) =>
        sensor.sensorIri !== sensorIri
          ? sensor
          : {
              ...sensor,
              properties: sensor.properties.map((binding) =>
                binding.propertyIri === propertyIri ? update(binding) : binding
              ),
            }
      ),
    });
  }

  setHidden(sensorIri: string, propertyIri: string, hidden: boolean): void {
    this.updateBinding(sensorIri, propertyIri, (b) => ({ ...b, hidden }));
  }

  setOptional(sensorIri: string, propertyIri: string, optional: boolean): void {
    this.updateBinding(sensorIri, propertyIri, (b) => ({ ...b, optional }));
  }

  /** Legal filter menu for a property; mirrors the service table. */
  legalFilters(sensorIri: string, propertyIri: string): string[] {
    const sensor = this.state.query.sensors.find((s) => s.sensorIri === sensorIri);
    const binding = sensor?.properties.find((p) => p.propertyIri === propertyIri);
    return binding ? LEGAL_FILTERS[binding.datatype] : [];
  }

  addFilter(sensorIri: string, propertyIri: string, filter: FilterSpec): string | null {
    const legal = this.legalFilters(sensorIri, propertyIri);
    if (!legal.includes(filter.type)) {
      return `${filter.type} filter is not legal for this property`;
    }
    this.updateBinding(sensorIri, propertyIri, (b) => ({
      ...b,
      filters: [...b.filters, canonicalFilter(filter)],
    }));
    return null;
  }

  removeFilter(sensorIri: string, propertyIri: string, index: number): void {
    this.updateBinding(sensorIri, propertyIri, (b) => ({
      ...b,
      filters: b.filters.filter((_, i) => i !== index),
    }));
  }

  setDateWindow(start?: string, end?: string): string | null {
    if (!start && !end) {
      const { dateWindow: _dropped, ...rest } = this.state.query;
      this.setQuery(rest as QueryDocument);
      return null;
    }
    if (start && end && start > end) return "start is after end";
    const window: { start?: string; end?: string } = {};
    if (start) window.start = start;
    if (end) window.end = end;
    this.setQuery({ ...this.state.query, dateWindow: window });
    return null;
  }

  setLimit(limit: number): string | null {
    if (!Number.isInteger(limit) || limit < 1) return "limit must be a positive integer";
    this.setQuery({ ...this.state.query, limit });
    return null;
  }

  // -- map ----------------------------------------------------------------

  circleDrawn(centerLatDeg: number, centerLonDeg: number, radiusMeters: number): string | null {
    if (centerLatDeg < -90 || centerLatDeg > 90) return "latitude out of [-90, 90]";
    if (centerLonDeg < -180 || centerLonDeg > 180) return "longitude out of [-180, 180]";
    if (!(radiusMeters > 0) || radiusMeters > MAX_RADIUS_METERS) {
      return "radius must be positive and at most half the Earth's circumference";
    }
    const circle: GeoCircle = { centerLatDeg, centerLonDeg, radiusMeters };
    this.setQuery({
      ...this.state.query,
      geo: { ...this.state.query.geo, circles: [...this.state.query.geo.circles, circle] },
    });
    return null;
  }

  removeCircle(index: number): void {
    this.setQuery({
      ...this.state.query,
      geo: {
        ...this.state.query.geo,
        circles: this.state.query.geo.circles.filter((_, i) => i !== index),
      },
    });
  }

  setCombinator(combinator: Combinator): void {
    this.setQuery({ ...this.state.query, geo: { ...this.state.query.geo, combinator } });
  }

  // -- other state --------------------------------------------------------

  reset(): void {
    this.state = {
      ...this.state,
      query: emptyQuery(),
      lastTable: null,
      lastSparql: null,
    };
    this.emit();
  }

  setAdvancedMode(advanced: boolean): void {
    this.state = { ...this.state, advancedMode: advanced };
    this.emit();
  }

  setApiBaseUrl(url: string): void {
    this.api.baseUrl = url;
    this.state = { ...this.state, settings: { ...this.state.settings, apiBaseUrl: url } };
    this.emit();
  }

  loadExample(query: QueryDocument): void {
    this.setQuery(cloneQuery(query));
  }

  // -- server round trips ---------------------------------------------------

  async compileOnly(): Promise<string> {
    const sparql = await this.api.compile(this.exportDocument());
    this.state = { ...this.state, lastSparql: sparql };
    this.emit();
    return sparql;
  }

  /** Run the current query; stale responses are discarded by sequence. */
  async runSearch(): Promise<void> {
    const seq = ++this.querySeq;
    this.state = { ...this.state, busy: true };
    this.emit();
    try {
      const result = await this.api.query(this.exportDocument());
      if (seq !== this.querySeq) return; // a newer request superseded this one
      this.state = { ...this.state, lastSparql: result.sparql, lastTable: result.table, busy: false };
      this.emit();
    } catch (error) {
      if (seq !== this.querySeq) return;
      this.state = { ...this.state, busy: false };
      this.emit();
      throw error;
    }
  }

  /**
   * Chat turn: the response's query replaces the store's document (the
   * one-store law), the transcript grows, and a triggered search fills
   * the results pane.
   */
  async submitChat(message: string): Promise<void> {
    if (!message.trim()) return;
    this.state = {
      ...this.state,
      chatTranscript: [...this.state.chatTranscript, { who: "user", text: message }],
    };
    this.emit();
    try {
      const response = await this.api.chat(message, this.sessionId, this.exportDocument());
      this.state = {
        ...this.state,
        query: response.query,
        chatTranscript: [...this.state.chatTranscript, { who: "bot", text: response.reply }],
      };
      this.emit();
      if (response.triggerSearch) {
        await this.runSearch();
      }
    } catch (error) {
      this.state = {
        ...this.state,
        chatTranscript: [
          ...this.state.chatTranscript,
          { who: "system", text: `request failed: ${String(error)}` },
        ],
      };
      this.emit();
    }
  }
}
