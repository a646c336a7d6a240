import { Store } from "./store.js";

/** Results pane: the tabular output plus the SPARQL that produced it. */
export function renderResults(store: Store, root: HTMLElement): void {
  const { lastTable, lastSparql, busy } = store.state;
  root.textContent = "";

  if (busy) {
    const note = document.createElement("p");
    note.className = "busy-note";
    note.textContent = "Running search...";
    root.append(note);
  }

  if (lastTable) {
    const table = document.createElement("table");
    table.className = "results-table";
    const head = document.createElement("tr");
    for (const column of lastTable.columns) {
      const th = document.createElement("th");
      th.textContent = column;
      head.append(th);
    }
    table.append(head);
    for (const row of lastTable.rows) {
      const tr = document.createElement("tr");
      for (const cell of row) {
        const td = document.createElement("td");
        td.textContent = cell.kind === "unbound" ? "" : cell.value ?? "";
        tr.append(td);
      }
      table.append(tr);
    }
    const count = document.createElement("p");
    count.className = "row-count";
    count.textContent = `${lastTable.rows.length} rows`;
    root.append(count, table);
  }

  if (lastSparql) {
    const pre = document.createElement("pre");
    pre.className = "sparql-view";
    pre.textContent = lastSparql;
    root.append(pre);
  }
}
