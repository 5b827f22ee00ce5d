// @vitest-environment jsdom
/**
 * DOM-level tests against a live service on a synthetic catalog (see
 * globalSetup).  They drive the page the way a writer would: type a
 * script, submit, click thumbnails, swap alternatives.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { beforeEach, describe, expect, inject, it } from "vitest";

import { initApp, type App } from "../src/app.js";
import { openPicker } from "../src/render.js";

const HTML = readFileSync(
  join(dirname(fileURLToPath(import.meta.url)), "..", "index.html"), "utf-8");

const SCRIPT = `INT. BEDROOM - NIGHT

MR. HARRISON
Come in, my boy.

JAMES
You wanted to see me?

MR. HARRISON
Sit down. There is plenty of time.
`;

function mountPage(): App {
  const body = /<body>([\s\S]*)<\/body>/.exec(HTML)![1];
  document.body.innerHTML = body;
  return initApp(document, inject("serverUrl"));
}

function setValue(selector: string, value: string): void {
  const el = document.querySelector(selector) as HTMLTextAreaElement | HTMLInputElement;
  el.value = value;
  el.dispatchEvent(new Event("input", { bubbles: true }));
}

async function submit(app: App, script: string, query: string): Promise<void> {
  setValue("#script-input", script);
  (document.querySelector("#query-text") as HTMLTextAreaElement).value = query;
  await app.submit();
}

describe("submit and render", () => {
  let app: App;
  beforeEach(() => {
    app = mountPage();
  });

  it("renders one establishing plus one image per dialogue line", async () => {
    await submit(app, SCRIPT, "");
    const rows = document.querySelectorAll("#results .row");
    expect(rows.length).toBeGreaterThan(0);
    for (const row of rows) {
      expect(row.querySelectorAll("img").length).toBe(3 + 1);
      expect(row.querySelectorAll(".cell.establishing img").length).toBe(1);
    }
    const captions = rows[0].querySelectorAll(".cell.line figcaption");
    expect(captions[0].textContent).toContain("MR. HARRISON");
    expect(captions[0].textContent).toContain("Come in");
  });

  it("shows a parse error with its position inline", async () => {
    const query = "select Place=Bedroom, Time-of-day=noonish";
    await submit(app, SCRIPT, query);
    const status = document.querySelector("#status")!;
    expect(status.className).toContain("error");
    expect(status.textContent).toContain("ParseError");
    expect(status.textContent).toContain(`position ${query.indexOf("noonish")}`);
    expect(document.querySelectorAll("#results .row").length).toBe(0);
  });

  it("shows a banner when nothing matches", async () => {
    await submit(app, SCRIPT, "select MovieYear>3000");
    const status = document.querySelector("#status")!;
    expect(status.className).toContain("warning");
    expect(status.textContent).toContain("No scenes found");
  });
});

describe("alternative swapping", () => {
  let app: App;
  beforeEach(async () => {
    app = mountPage();
    await submit(app, SCRIPT, "");
  });

  it("lists exactly the endpoint's frames, in order", async () => {
    const row = app.state.lastResponse!.results[0];
    const castId = row.assignment[row.lines[1].character].cast_id;
    const expected = await app.api.alternatives(row.scene_id, castId);

    await openPicker(app.renderContext(), 0, 1);
    const options = [...document.querySelectorAll(".picker-option")];
    expect(options.map((o) => (o as HTMLElement).dataset.frameId))
      .toEqual(expected.frame_ids);
  });

  it("swapping mutates only the clicked cell", async () => {
    const before = [...document.querySelectorAll('#results .row[data-row="0"] img')]
      .map((img) => (img as HTMLImageElement).src);

    await openPicker(app.renderContext(), 0, 1);
    const options = [...document.querySelectorAll(".picker-option")] as HTMLElement[];
    const current = (document.querySelector(
      '#results .row[data-row="0"] img[data-line="1"]') as HTMLElement).dataset.frameId;
    const target = options.find((o) => o.dataset.frameId !== current);
    if (!target) return;   // single alternative in this scene; nothing to swap
    target.click();

    const after = [...document.querySelectorAll('#results .row[data-row="0"] img')]
      .map((img) => (img as HTMLImageElement).src);
    expect(document.querySelector(".picker")!.className).not.toContain("open");
    expect(after.length).toBe(before.length);
    for (let i = 0; i < after.length; i++) {
      if (i === 2) expect(after[i]).not.toBe(before[i]);   // establishing + line0, then line1
      else expect(after[i]).toBe(before[i]);
    }
    expect(app.state.overrides.size).toBe(1);
    expect(app.state.overrideFor(0, 1)).toBe(target.dataset.frameId);
  });

  it("resubmitting clears overrides", async () => {
    app.state.setOverride(0, 1, "whatever");
    expect(app.state.overrides.size).toBe(1);
    await submit(app, SCRIPT, "select Time-of-day=Variable");
    expect(app.state.overrides.size).toBe(0);
  });
});

describe("attribute builder", () => {
  let app: App;
  beforeEach(async () => {
    app = mountPage();
    await app.loadLocations();
  });

  it("controls generate canonical query text", () => {
    const select = document.querySelector("#loc-select") as HTMLSelectElement;
    expect(select.options.length).toBeGreaterThan(2);
    select.value = "bedroom";
    select.dispatchEvent(new Event("change", { bubbles: true }));
    const tod = document.querySelector("#tod-select") as HTMLSelectElement;
    tod.value = "variable";
    tod.dispatchEvent(new Event("change", { bubbles: true }));

    const text = (document.querySelector("#query-text") as HTMLTextAreaElement).value;
    expect(text).toBe("select Place=bedroom, Time-of-day=Variable");
  });

  it("raw text populates the controls when parseable", () => {
    setValue("#query-text",
      "select Place=Snowy Forest, Character1Gender=Female where Character1Age>40");
    expect((document.querySelector("#loc-free") as HTMLInputElement).value)
      .toBe("Snowy Forest");
    const genderSelect = document.querySelector(".slot-gender") as HTMLSelectElement;
    expect(genderSelect.value).toBe("female");
    expect((document.querySelector(".slot-age") as HTMLInputElement).value)
      .toBe(">40");
    expect(app.builder.isEnabled()).toBe(true);
  });

  it("unparseable text disables controls but keeps the text editable", () => {
    setValue("#query-text", "select Plaze=Bedroom");
    expect(app.builder.isEnabled()).toBe(false);
    expect((document.querySelector("#loc-select") as HTMLSelectElement).disabled)
      .toBe(true);
    const textBox = document.querySelector("#query-text") as HTMLTextAreaElement;
    expect(textBox.disabled).toBe(false);

    setValue("#query-text", "select Place=Bedroom");
    expect(app.builder.isEnabled()).toBe(true);
  });

  it("builder to text to builder is a fixpoint", () => {
    const canonical =
      "select Place=bedroom, Time-of-day=Variable, MovieYear>1980, " +
      "Character1Gender=Female, Character1Age>40, Character2=Jean";
    setValue("#query-text", canonical);
    const textBox = document.querySelector("#query-text") as HTMLTextAreaElement;

    // regenerate the text from the populated controls: unchanged
    app.builder.pushToText();
    expect(textBox.value).toBe(canonical);
    // and the cycle is stable
    app.builder.pullFromText();
    app.builder.pushToText();
    expect(textBox.value).toBe(canonical);
  });
});
