import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import path from "node:path";

import { Api } from "../src/api.js";
import { mountApp } from "../src/app.js";
import { Store } from "../src/store.js";
import type { QueryDocument } from "../src/types.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const goldenDir = path.join(here, "..", "..", "tests", "golden");

export function goldenDocument(name: string): QueryDocument {
  return JSON.parse(readFileSync(path.join(goldenDir, `${name}.json`), "utf-8"));
}

export function goldenSparql(name: string): string {
  return readFileSync(path.join(goldenDir, `${name}.rq`), "utf-8");
}

export async function mount(baseUrl: string, api?: Api): Promise<{ store: Store; root: HTMLElement }> {
  // run the page on the service origin, as the served UI would
  (window as any).happyDOM?.setURL(baseUrl);
  const root = document.createElement("div");
  document.body.append(root);
  const store = new Store(api ?? new Api(baseUrl));
  await mountApp(root, store);
  return { store, root };
}

export async function until(check: () => boolean, timeoutMs = 10_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((r) => setTimeout(r, 25));
  }
  throw new Error("condition not reached in time");
}

export function click(element: Element | null): void {
  if (!element) throw new Error("element to click not found");
  element.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function setInput(element: Element | null, value: string): void {
  if (!element) throw new Error("input not found");
  (element as HTMLInputElement).value = value;
  element.dispatchEvent(new Event("change", { bubbles: true }));
}
