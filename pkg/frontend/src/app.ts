/** Wires the panels together: script editor, attribute builder, submit,
 * result grid, and the alternative-frame picker. */

import { ApiClient, RequestFailed } from "./api.js";
import { AttributeBuilder } from "./builder.js";
import { closePicker, renderResults, renderStatus, type RenderContext } from "./render.js";
import { SessionState } from "./state.js";

export class App {
  readonly api: ApiClient;
  readonly state = new SessionState();
  readonly builder: AttributeBuilder;
  private doc: Document;
  private scriptBox: HTMLTextAreaElement;
  private queryBox: HTMLTextAreaElement;
  private statusHost: HTMLElement;
  private resultsHost: HTMLElement;
  private pickerHost: HTMLElement;
  private inflight: AbortController | null = null;

  constructor(doc: Document, baseUrl = "") {
    this.doc = doc;
    this.api = new ApiClient(baseUrl);
    this.scriptBox = doc.querySelector("#script-input")!;
    this.queryBox = doc.querySelector("#query-text")!;
    this.statusHost = doc.querySelector("#status")!;
    this.resultsHost = doc.querySelector("#results")!;
    this.pickerHost = doc.querySelector("#picker")!;
    this.builder = new AttributeBuilder(doc, doc.querySelector("#builder")!,
                                        this.queryBox);
    doc.querySelector("#submit")!.addEventListener("click", () => {
      void this.submit();
    });
  }

  async loadLocations(): Promise<void> {
    try {
      this.builder.setLocations(await this.api.locations());
    } catch {
      // the dropdown stays empty; free-text entry still works
    }
  }

  renderContext(): RenderContext {
    return { doc: this.doc, api: this.api, state: this.state,
             container: this.resultsHost, pickerHost: this.pickerHost };
  }

  /** Send the current script and query; render rows or an error. */
  async submit(): Promise<void> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.state.scriptText = this.scriptBox.value;
    this.state.queryText = this.queryBox.value;
    renderStatus(this.statusHost, "", "Searching…");
    closePicker(this.pickerHost);
    try {
      const response = await this.api.visualize(this.state.scriptText,
                                                this.state.queryText, 20,
                                                controller.signal);
      if (this.inflight !== controller) return;  // superseded
      this.state.setResponse(response);
      renderResults(this.renderContext());
      if (response.results.length === 0) {
        renderStatus(this.statusHost, "warning",
                     `No scenes found. ${response.warnings.join(" ")}`);
      } else {
        renderStatus(this.statusHost, "", "");
      }
    } catch (err) {
      if (controller.signal.aborted) return;
      if (err instanceof RequestFailed) {
        const where = err.body.position !== null
          ? ` (position ${err.body.position})` : "";
        renderStatus(this.statusHost, "error",
                     `${err.body.error_kind}: ${err.body.detail}${where}`);
      } else {
        renderStatus(this.statusHost, "error", `Request failed: ${err}`);
      }
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }
}

export function initApp(doc: Document, baseUrl = ""): App {
  return new App(doc, baseUrl);
}
