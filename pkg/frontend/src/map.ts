import { Store } from "./store.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const METERS_PER_DEGREE_LAT = 111194.92664455873;

/** Viewport of the blank-grid map; defaults frame the bundled fixture. */
export interface MapView {
  centerLat: number;
  centerLon: number;
  degreesAcross: number;
  widthPx: number;
  heightPx: number;
}

export const DEFAULT_VIEW: MapView = {
  centerLat: 4.3,
  centerLon: 114.4,
  degreesAcross: 1.4,
  widthPx: 420,
  heightPx: 420,
};

export function pixelToLatLon(view: MapView, x: number, y: number): { lat: number; lon: number } {
  const degPerPx = view.degreesAcross / view.widthPx;
  return {
    lat: view.centerLat + (view.heightPx / 2 - y) * degPerPx,
    lon: view.centerLon + (x - view.widthPx / 2) * degPerPx,
  };
}

export function latLonToPixel(view: MapView, lat: number, lon: number): { x: number; y: number } {
  const pxPerDeg = view.widthPx / view.degreesAcross;
  return {
    x: view.widthPx / 2 + (lon - view.centerLon) * pxPerDeg,
    y: view.heightPx / 2 - (lat - view.centerLat) * pxPerDeg,
  };
}

/**
 * Blank-grid map pane with click-drag circle drawing: press at the
 * center, release at the rim. No external tile server involved.
 */
export function renderMap(store: Store, root: HTMLElement, view: MapView = DEFAULT_VIEW): void {
  const { query } = store.state;
  root.textContent = "";

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "map-canvas");
  svg.setAttribute("width", String(view.widthPx));
  svg.setAttribute("height", String(view.heightPx));
  svg.setAttribute("viewBox", `0 0 ${view.widthPx} ${view.heightPx}`);

  // local blank grid, one line per 0.2 degrees
  const step = (0.2 / view.degreesAcross) * view.widthPx;
  for (let offset = 0; offset <= view.widthPx; offset += step) {
    const vertical = document.createElementNS(SVG_NS, "line");
    vertical.setAttribute("x1", String(offset));
    vertical.setAttribute("x2", String(offset));
    vertical.setAttribute("y1", "0");
    vertical.setAttribute("y2", String(view.heightPx));
    vertical.setAttribute("class", "grid-line");
    svg.append(vertical);
    const horizontal = document.createElementNS(SVG_NS, "line");
    horizontal.setAttribute("x1", "0");
    horizontal.setAttribute("x2", String(view.widthPx));
    horizontal.setAttribute("y1", String(offset));
    horizontal.setAttribute("y2", String(offset));
    horizontal.setAttribute("class", "grid-line");
    svg.append(horizontal);
  }

  const pxPerMeter = view.widthPx / (view.degreesAcross * METERS_PER_DEGREE_LAT);
  query.geo.circles.forEach((circle, index) => {
    const { x, y } = latLonToPixel(view, circle.centerLatDeg, circle.centerLonDeg);
    const shape = document.createElementNS(SVG_NS, "circle");
    shape.setAttribute("class", "geo-circle");
    shape.setAttribute("data-index", String(index));
    shape.setAttribute("cx", String(x));
    shape.setAttribute("cy", String(y));
    shape.setAttribute("r", String(circle.radiusMeters * pxPerMeter));
    shape.addEventListener("dblclick", () => store.removeCircle(index));
    svg.append(shape);
  });

  let pressed: { x: number; y: number } | null = null;
  const problem = document.createElement("span");
  problem.className = "inline-error map-error";
  svg.addEventListener("mousedown", (event: MouseEvent) => {
    pressed = { x: event.offsetX, y: event.offsetY };
  });
  svg.addEventListener("mouseup", (event: MouseEvent) => {
    if (!pressed) return;
    const center = pixelToLatLon(view, pressed.x, pressed.y);
    const dx = (event.offsetX - pressed.x) / pxPerMeter;
    const dy = (event.offsetY - pressed.y) / pxPerMeter;
    pressed = null;
    const radius = Math.hypot(dx, dy);
    if (radius < 1) return; // a click, not a drag
    const error = store.circleDrawn(center.lat, center.lon, radius);
    problem.textContent = error ?? "";
  });

  root.append(svg, problem);

  // combinator control enabled once a second circle exists
  const controls = document.createElement("div");
  controls.className = "geo-controls";
  const select = document.createElement("select");
  select.className = "combinator-select";
  for (const value of ["union", "intersection"] as const) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    if (query.geo.combinator === value) option.selected = true;
    select.append(option);
  }
  select.disabled = query.geo.circles.length < 2;
  select.addEventListener("change", () =>
    store.setCombinator(select.value as "union" | "intersection")
  );
  const label = document.createElement("label");
  label.append("Circles combine as ", select);
  controls.append(label);
  root.append(controls);
}
