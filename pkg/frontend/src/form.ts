import { Store } from "./store.js";
import { FilterSpec, FilterType, PropertyBinding, SensorSelection } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function describeFilter(f: FilterSpec): string {
  switch (f.type) {
    case "contain":
      return `contains "${f.text}"`;
    case "match":
      return `matches "${f.text}"`;
    case "regex":
      return `regex /${f.pattern}/${f.flags ?? ""}`;
    case "range": {
      const parts = [];
      if (f.min !== undefined) parts.push(`>= ${f.min}`);
      if (f.max !== undefined) parts.push(`<= ${f.max}`);
      return parts.join(" and ");
    }
    case "equals":
      return `= ${JSON.stringify(f.value)}`;
  }
}

function parseFilterInput(type: FilterType, binding: PropertyBinding, raw: string): FilterSpec | string {
  const numeric = binding.datatype === "integer" || binding.datatype === "decimal" || binding.datatype === "double";
  const toScalar = (text: string): string | number | boolean | null => {
    const trimmed = text.trim();
    if (binding.datatype === "boolean") {
      if (trimmed === "true") return true;
      if (trimmed === "false") return false;
      return null;
    }
    if (numeric) {
      const n = Number(trimmed);
      return Number.isFinite(n) ? n : null;
    }
    return trimmed;
  };
  switch (type) {
    case "contain":
    case "match":
      return { type, text: raw };
    case "regex": {
      const slash = raw.lastIndexOf("/");
      if (raw.startsWith("/") && slash > 0) {
        return { type, pattern: raw.slice(1, slash), flags: raw.slice(slash + 1) };
      }
      return { type, pattern: raw, flags: "" };
    }
    case "equals": {
      const value = toScalar(raw);
      return value === null ? "cannot read that value" : { type, value };
    }
    case "range": {
      const [lo, hi] = raw.split("..", 2);
      const out: FilterSpec = { type };
      if (lo?.trim()) {
        const v = toScalar(lo);
        if (v === null) return "cannot read the lower bound";
        out.min = v;
      }
      if (hi?.trim()) {
        const v = toScalar(hi);
        if (v === null) return "cannot read the upper bound";
        out.max = v;
      }
      if (out.min === undefined && out.max === undefined) return "give at least one bound (min..max)";
      return out;
    }
  }
}

function propertyRow(store: Store, sensor: SensorSelection, binding: PropertyBinding): HTMLElement {
  const row = el("li", { class: "property-row", "data-property": binding.propertyIri });
  row.append(el("span", { class: "property-label" }, `${binding.label} (${binding.datatype})`));

  const hidden = el("input", { type: "checkbox", class: "toggle-hidden" }) as HTMLInputElement;
  hidden.checked = binding.hidden;
  hidden.addEventListener("change", () =>
    store.setHidden(sensor.sensorIri, binding.propertyIri, hidden.checked)
  );
  const optional = el("input", { type: "checkbox", class: "toggle-optional" }) as HTMLInputElement;
  optional.checked = binding.optional;
  optional.addEventListener("change", () =>
    store.setOptional(sensor.sensorIri, binding.propertyIri, optional.checked)
  );
  row.append(
    el("label", { class: "flag" }, hidden, " hidden"),
    el("label", { class: "flag" }, optional, " optional")
  );

  const filterList = el("ul", { class: "filter-list" });
  binding.filters.forEach((filter, index) => {
    const remove = el("button", { type: "button", class: "remove-filter" }, "x");
    remove.addEventListener("click", () =>
      store.removeFilter(sensor.sensorIri, binding.propertyIri, index)
    );
    filterList.append(el("li", { class: "filter-chip" }, describeFilter(filter), " ", remove));
  });
  row.append(filterList);

  // the filter menu offers exactly the datatype's legal variants
  const select = el("select", { class: "filter-type" }) as HTMLSelectElement;
  for (const legal of store.legalFilters(sensor.sensorIri, binding.propertyIri)) {
    select.append(el("option", { value: legal }, legal));
  }
  const input = el("input", {
    type: "text",
    class: "filter-value",
    placeholder: "value (range: min..max)",
  }) as HTMLInputElement;
  const add = el("button", { type: "button", class: "add-filter" }, "add filter");
  const problem = el("span", { class: "inline-error" });
  add.addEventListener("click", () => {
    const parsed = parseFilterInput(select.value as FilterType, binding, input.value);
    if (typeof parsed === "string") {
      problem.textContent = parsed;
      return;
    }
    const error = store.addFilter(sensor.sensorIri, binding.propertyIri, parsed);
    problem.textContent = error ?? "";
    if (!error) input.value = "";
  });
  row.append(el("span", { class: "filter-editor" }, select, input, add, problem));
  return row;
}

/** Render the whole form pane (sensor list + detailed querying) from the store. */
export function renderForm(store: Store, root: HTMLElement): void {
  const { catalog, query, advancedMode } = store.state;
  root.textContent = "";

  const sensorList = el("ul", { class: "sensor-list" });
  for (const sensor of catalog?.sensors ?? []) {
    const checkbox = el("input", {
      type: "checkbox",
      class: "sensor-checkbox",
      "data-sensor": sensor.sensorIri,
    }) as HTMLInputElement;
    checkbox.checked = store.isSelected(sensor.sensorIri);
    checkbox.addEventListener("change", () => store.toggleSensor(sensor.sensorIri));
    sensorList.append(
      el("li", { class: "sensor-item" }, el("label", {}, checkbox, ` ${sensor.label}`))
    );
  }
  root.append(el("section", { class: "sensors" }, el("h3", {}, "Sensors"), sensorList));

  // date window
  const start = el("input", { type: "text", class: "date-start", placeholder: "2020-01-01T00:00:00Z" }) as HTMLInputElement;
  const end = el("input", { type: "text", class: "date-end", placeholder: "2020-12-31T23:59:59Z" }) as HTMLInputElement;
  start.value = query.dateWindow?.start ?? "";
  end.value = query.dateWindow?.end ?? "";
  const dateProblem = el("span", { class: "inline-error" });
  const applyWindow = () => {
    const error = store.setDateWindow(start.value.trim() || undefined, end.value.trim() || undefined);
    dateProblem.textContent = error ?? "";
  };
  start.addEventListener("change", applyWindow);
  end.addEventListener("change", applyWindow);
  root.append(
    el("section", { class: "date-window" }, el("h3", {}, "Date range"), start, " to ", end, dateProblem)
  );

  // limit
  const limit = el("input", { type: "number", class: "limit-input", min: "1" }) as HTMLInputElement;
  limit.value = String(query.limit);
  const limitProblem = el("span", { class: "inline-error" });
  limit.addEventListener("change", () => {
    const error = store.setLimit(Number(limit.value));
    limitProblem.textContent = error ?? "";
  });
  root.append(el("section", { class: "limit" }, el("h3", {}, "Row limit"), limit, limitProblem));

  // detailed querying, hidden until the customisation toggle is on
  const toggle = el("button", { type: "button", class: "advanced-toggle" },
    advancedMode ? "Hide search customisation" : "Search customisation");
  toggle.addEventListener("click", () => store.setAdvancedMode(!advancedMode));
  root.append(toggle);

  const detail = el("section", { class: "advanced" });
  if (!advancedMode) detail.setAttribute("hidden", "hidden");
  for (const sensor of query.sensors) {
    const rows = el("ul", { class: "property-rows" });
    for (const binding of sensor.properties) {
      rows.append(propertyRow(store, sensor, binding));
    }
    detail.append(el("div", { class: "selected-sensor", "data-sensor": sensor.sensorIri },
      el("h4", {}, sensor.label), rows));
  }
  root.append(detail);
}
