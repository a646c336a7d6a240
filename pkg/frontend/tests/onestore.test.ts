// One-store law: the form, map, and chat all render from the single
// query document; after every chat turn the store's document is exactly
// the query field of the chat response, across a long interleaving of
// form edits and chat mutations.
import { beforeAll, describe, expect, inject, it } from "vitest";

import { Api } from "../src/api.js";
import type { ChatResponse, QueryDocument } from "../src/types.js";
import { click, mount, until } from "./helpers.js";

const W = "http://example.org/wildlife/";
let baseUrl: string;

beforeAll(() => {
  baseUrl = inject("apiBaseUrl");
});

class RecordingApi extends Api {
  lastChatResponse: ChatResponse | null = null;

  override async chat(message: string, sessionId?: string, query?: QueryDocument) {
    const response = await super.chat(message, sessionId, query);
    this.lastChatResponse = response;
    return response;
  }
}

describe("one-store law", () => {
  it("holds across >=10 interleaved form edits and chat mutations", async () => {
    const api = new RecordingApi(baseUrl);
    const { store, root } = await mount(baseUrl, api);

    const assertLaw = () => {
      // serializing the UI's document equals the chat response's query
      expect(store.state.query).toEqual(api.lastChatResponse!.query);
    };

    // 1. form: select Aqeela
    click(root.querySelector(`.sensor-checkbox[data-sensor="${W}sensor/aqeela"]`));
    // 2. chat: add a date range (the turn must build on the form's sensor)
    await store.submitChat("from 2020-02-01 to 2020-08-31");
    assertLaw();
    expect(store.state.query.sensors.map((s) => s.label)).toEqual(["Aqeela"]);
    expect(store.state.query.dateWindow?.start).toBe("2020-02-01T00:00:00Z");

    // 3. form: hide latitude
    click(root.querySelector(".advanced-toggle"));
    click(
      root
        .querySelector(`.property-row[data-property="${W}property/latitude"]`)!
        .querySelector(".toggle-hidden")
    );
    // 4. form: draw a circle
    expect(store.circleDrawn(4.3, 114.42, 22000)).toBeNull();
    // 5. chat: another circle via chat
    await store.submitChat("within 22 km of 4.42, 114.3");
    assertLaw();
    expect(store.state.query.geo.circles).toHaveLength(2);
    expect(store.state.query.sensors[0].properties[0].hidden).toBe(true);

    // 6. form: switch combinator
    const select = root.querySelector(".combinator-select") as HTMLSelectElement;
    select.value = "intersection";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    // 7. chat: set a limit
    await store.submitChat("limit 25");
    assertLaw();
    expect(store.state.query.limit).toBe(25);
    expect(store.state.query.geo.combinator).toBe("intersection");

    // 8. form: mark temperature optional
    click(
      root
        .querySelector(`.property-row[data-property="${W}property/temperature"]`)!
        .querySelector(".toggle-optional")
    );
    // 9. chat: select Bora too (replaces nothing, adds a sensor)
    await store.submitChat("select Bora");
    assertLaw();
    expect(store.state.query.sensors.map((s) => s.label)).toEqual(["Aqeela", "Bora"]);
    const temperature = store.state.query.sensors[0].properties.find((p) =>
      p.propertyIri.endsWith("/temperature")
    );
    expect(temperature?.optional).toBe(true);

    // 10. form: bump the limit
    expect(store.setLimit(40)).toBeNull();
    // 11. chat: run the search (no mutations; document unchanged)
    const beforeRun = store.exportDocument();
    await store.submitChat("run");
    assertLaw();
    expect(store.state.query).toEqual(beforeRun);
    await until(() => store.state.lastTable !== null);

    // the form pane still renders from the same single document
    const checked = [...root.querySelectorAll(".sensor-checkbox")].filter(
      (box) => (box as HTMLInputElement).checked
    );
    expect(checked).toHaveLength(2);

    // 12. chat: reset clears the one store, and the form follows
    await store.submitChat("reset");
    assertLaw();
    expect(store.state.query.sensors).toHaveLength(0);
    expect(
      [...root.querySelectorAll(".sensor-checkbox")].every(
        (box) => !(box as HTMLInputElement).checked
      )
    ).toBe(true);
  });

  it("loading an example resets every pane to that document", async () => {
    const { store, root } = await mount(baseUrl);
    click(root.querySelector('.example-load[data-name="date-window"]'));
    expect(store.state.query.sensors.map((s) => s.label)).toEqual(["Bora"]);
    const checkbox = root.querySelector(
      `.sensor-checkbox[data-sensor="${W}sensor/bora"]`
    ) as HTMLInputElement;
    expect(checkbox.checked).toBe(true);
    expect((root.querySelector(".date-start") as HTMLInputElement).value).toBe(
      "2020-06-01T00:00:00Z"
    );
    expect((root.querySelector(".limit-input") as HTMLInputElement).value).toBe("100");
  });

  it("import replaces the document, export round-trips it", async () => {
    const { store } = await mount(baseUrl);
    const doc = {
      version: "1",
      limit: 7,
      sensors: [
        {
          sensorIri: `${W}sensor/chikaku`,
          label: "Chikaku",
          properties: [
            {
              propertyIri: `${W}property/speed`,
              label: "Speed",
              datatype: "double" as const,
              hidden: false,
              optional: false,
              filters: [],
            },
          ],
        },
      ],
      geo: { circles: [], combinator: "union" as const },
    };
    expect(store.importDocument(doc)).toBeNull();
    expect(store.exportDocument()).toEqual(doc);
    expect(store.importDocument({ bogus: true })).toMatch(/missing/);
  });
});
