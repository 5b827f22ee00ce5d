/** Thin client for the service's /api/v1 endpoints. */

export interface FrameRef {
  frame_id: string;
  image_url: string;
}

export interface LineCell extends FrameRef {
  line_index: number;
  character: string;
}

export interface ResultRow {
  scene_id: string;
  movie: { title: string; year: number };
  assignment: Record<string, { cast_id: string; name: string }>;
  establishing: FrameRef;
  lines: LineCell[];
}

export interface VisualizeResponse {
  results: ResultRow[];
  warnings: string[];
}

export interface ApiError {
  error_kind: string;
  position: number | null;
  detail: string;
}

export class RequestFailed extends Error {
  constructor(public body: ApiError) {
    super(body.detail);
  }
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  url(path: string): string {
    return this.baseUrl + path;
  }

  async visualize(script: string, query: string, maxResults: number,
                  signal?: AbortSignal): Promise<VisualizeResponse> {
    const response = await fetch(this.url("/api/v1/visualize"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ script, query, max_results: maxResults }),
      signal,
    });
    const body = await response.json();
    if (!response.ok) throw new RequestFailed(body as ApiError);
    return body as VisualizeResponse;
  }

  async alternatives(sceneId: string, castId: string):
      Promise<{ frame_ids: string[]; image_urls: string[] }> {
    const params = new URLSearchParams({ cast_id: castId });
    const response = await fetch(
      this.url(`/api/v1/scenes/${encodeURIComponent(sceneId)}/alternatives?${params}`));
    const body = await response.json();
    if (!response.ok) throw new RequestFailed(body as ApiError);
    return body;
  }

  async locations(): Promise<string[]> {
    const response = await fetch(this.url("/api/v1/locations"));
    const body = await response.json();
    if (!response.ok) throw new RequestFailed(body as ApiError);
    return body.vocabulary as string[];
  }
}
