import { renderChat } from "./chat.js";
import { renderForm } from "./form.js";
import { renderMap } from "./map.js";
import { renderResults } from "./results.js";
import { Store } from "./store.js";
import { ExampleEntry } from "./types.js";

function section(root: HTMLElement, className: string): HTMLElement {
  const node = document.createElement("div");
  node.className = className;
  root.append(node);
  return node;
}

/** Assemble every pane around one store and keep them rendered from it. */
export async function mountApp(root: HTMLElement, store: Store): Promise<Store> {
  root.textContent = "";

  const examplesPane = section(root, "pane examples-pane");
  const formPane = section(root, "pane form-pane");
  const mapPane = section(root, "pane map-pane");
  const chatPane = section(root, "pane chat-pane");
  const actionsPane = section(root, "pane actions-pane");
  const resultsPane = section(root, "pane results-pane");
  const settingsPane = section(root, "pane settings-pane");

  let examples: ExampleEntry[] = [];

  const renderExamples = () => {
    examplesPane.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = "Examples";
    const list = document.createElement("ul");
    list.className = "examples-list";
    for (const entry of examples) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.type = "button";
      button.className = "example-load";
      button.dataset.name = entry.name;
      button.textContent = entry.name;
      button.title = entry.description;
      button.addEventListener("click", () => store.loadExample(entry.query));
      item.append(button);
      list.append(item);
    }
    examplesPane.append(heading, list);
  };

  const renderActions = () => {
    actionsPane.textContent = "";
    const search = document.createElement("button");
    search.type = "button";
    search.className = "search-button";
    search.textContent = "Search";
    search.addEventListener("click", () => {
      void store.runSearch().catch(() => undefined); // surfaced via store state
    });

    const showSparql = document.createElement("button");
    showSparql.type = "button";
    showSparql.className = "compile-button";
    showSparql.textContent = "Show SPARQL";
    showSparql.addEventListener("click", () => {
      void store.compileOnly().catch(() => undefined);
    });

    const exportButton = document.createElement("button");
    exportButton.type = "button";
    exportButton.className = "export-button";
    exportButton.textContent = "Export query";
    exportButton.addEventListener("click", () => {
      const payload = JSON.stringify(store.exportDocument(), null, 2) + "\n";
      const anchor = document.createElement("a");
      anchor.href = "data:application/json;charset=utf-8," + encodeURIComponent(payload);
      anchor.download = "query.json";
      anchor.click();
    });

    const importInput = document.createElement("input");
    importInput.type = "file";
    importInput.className = "import-input";
    importInput.accept = ".json,application/json";
    importInput.addEventListener("change", () => {
      const file = importInput.files?.[0];
      if (!file) return;
      void file.text().then((text) => {
        try {
          store.importDocument(JSON.parse(text));
        } catch {
          /* malformed file: leave state unchanged */
        }
      });
    });

    const resetButton = document.createElement("button");
    resetButton.type = "button";
    resetButton.className = "reset-button";
    resetButton.textContent = "Reset";
    resetButton.addEventListener("click", () => store.reset());

    actionsPane.append(search, showSparql, exportButton, importInput, resetButton);
  };

  const renderSettings = () => {
    settingsPane.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent = "Settings";
    const url = document.createElement("input");
    url.type = "text";
    url.className = "settings-api-url";
    url.value = store.state.settings.apiBaseUrl;
    url.placeholder = "service base URL (empty = same origin)";
    url.addEventListener("change", () => store.setApiBaseUrl(url.value.trim()));
    settingsPane.append(heading, url);
  };

  const renderAll = () => {
    renderForm(store, formPane);
    renderMap(store, mapPane);
    renderChat(store, chatPane);
    renderResults(store, resultsPane);
    renderActions();
    renderSettings();
  };

  store.subscribe(renderAll);

  try {
    await store.loadCatalog();
  } catch {
    /* endpoint down: panes render with an empty catalog */
  }
  try {
    examples = await store.api.examples();
  } catch {
    examples = [];
  }
  renderExamples();
  renderAll();
  return store;
}
