/** Result grid and the alternative-frame picker. */

import type { ApiClient, ResultRow } from "./api.js";
import type { SessionState } from "./state.js";

const SNIPPET_LENGTH = 40;

function snippet(text: string): string {
  return text.length <= SNIPPET_LENGTH ? text : text.slice(0, SNIPPET_LENGTH - 1) + "…";
}

export interface RenderContext {
  doc: Document;
  api: ApiClient;
  state: SessionState;
  container: HTMLElement;
  pickerHost: HTMLElement;
}

export function renderStatus(host: HTMLElement, kind: "" | "error" | "warning",
                             message: string): void {
  host.textContent = message;
  host.className = kind ? `status ${kind}` : "status";
}

export function renderResults(ctx: RenderContext): void {
  const { doc, state, container } = ctx;
  container.textContent = "";
  const response = state.lastResponse;
  if (!response) return;

  response.results.forEach((row, rowIndex) => {
    const rowEl = doc.createElement("div");
    rowEl.className = "row";
    rowEl.dataset.row = String(rowIndex);

    const caption = doc.createElement("div");
    caption.className = "row-caption";
    const casts = Object.entries(row.assignment)
      .map(([character, cast]) => `${character} → ${cast.name}`)
      .join(", ");
    caption.textContent =
      `${row.movie.title} (${row.movie.year}) · ${row.scene_id}` +
      (casts ? ` · ${casts}` : "");
    rowEl.appendChild(caption);

    const strip = doc.createElement("div");
    strip.className = "strip";
    strip.appendChild(renderCell(ctx, rowIndex, row, null));
    row.lines.forEach((_line, lineIndex) => {
      strip.appendChild(renderCell(ctx, rowIndex, row, lineIndex));
    });
    rowEl.appendChild(strip);
    container.appendChild(rowEl);
  });
}

function renderCell(ctx: RenderContext, rowIndex: number, row: ResultRow,
                    lineIndex: number | null): HTMLElement {
  const { doc, api, state } = ctx;
  const cell = doc.createElement("figure");
  cell.className = lineIndex === null ? "cell establishing" : "cell line";

  const img = doc.createElement("img");
  const label = doc.createElement("figcaption");
  if (lineIndex === null) {
    img.src = api.url(row.establishing.image_url);
    img.dataset.frameId = row.establishing.frame_id;
    label.textContent = "establishing";
  } else {
    const line = row.lines[lineIndex];
    const override = state.overrideFor(rowIndex, lineIndex);
    const frameId = override ?? line.frame_id;
    img.src = api.url(`/api/v1/frames/${encodeURIComponent(frameId)}/image`);
    img.dataset.frameId = frameId;
    img.dataset.line = String(lineIndex);
    img.classList.add("swappable");
    img.addEventListener("click", () => {
      void openPicker(ctx, rowIndex, lineIndex);
    });
    const text = state.lineTexts[line.line_index] ?? "";
    label.textContent = text ? `${line.character}: ${snippet(text)}` : line.character;
  }
  cell.appendChild(img);
  cell.appendChild(label);
  return cell;
}

/** Fetch alternatives for the clicked cell and show the picker. */
export async function openPicker(ctx: RenderContext, rowIndex: number,
                                 lineIndex: number): Promise<void> {
  const { doc, api, state, pickerHost } = ctx;
  const row = state.lastResponse!.results[rowIndex];
  const line = row.lines[lineIndex];
  const castId = row.assignment[line.character].cast_id;
  const body = await api.alternatives(row.scene_id, castId);

  pickerHost.textContent = "";
  pickerHost.classList.add("open");
  const panel = doc.createElement("div");
  panel.className = "picker-panel";
  const title = doc.createElement("p");
  title.textContent = `Alternatives for ${line.character} (line ${line.line_index + 1})`;
  panel.appendChild(title);
  const list = doc.createElement("div");
  list.className = "picker-list";
  body.frame_ids.forEach((frameId, i) => {
    const option = doc.createElement("img");
    option.src = api.url(body.image_urls[i]);
    option.dataset.frameId = frameId;
    option.className = "picker-option";
    option.addEventListener("click", () => {
      state.setOverride(rowIndex, lineIndex, frameId);
      updateCell(ctx, rowIndex, lineIndex, frameId);
      closePicker(pickerHost);
    });
    list.appendChild(option);
  });
  panel.appendChild(list);
  const cancel = doc.createElement("button");
  cancel.textContent = "Cancel";
  cancel.addEventListener("click", () => closePicker(pickerHost));
  panel.appendChild(cancel);
  pickerHost.appendChild(panel);
}

function updateCell(ctx: RenderContext, rowIndex: number, lineIndex: number,
                    frameId: string): void {
  const selector = `.row[data-row="${rowIndex}"] img[data-line="${lineIndex}"]`;
  const img = ctx.container.querySelector<HTMLImageElement>(selector);
  if (img) {
    img.src = ctx.api.url(`/api/v1/frames/${encodeURIComponent(frameId)}/image`);
    img.dataset.frameId = frameId;
  }
}

export function closePicker(pickerHost: HTMLElement): void {
  pickerHost.textContent = "";
  pickerHost.classList.remove("open");
}
