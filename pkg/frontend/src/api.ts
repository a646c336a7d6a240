import type { Catalog, ChatResponse, ExampleEntry, QueryDocument, ResultTable } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly diagnostics?: { severity: string; path: string; message: string }[]
  ) {
    super(message);
  }
}

async function asJson(response: Response): Promise<any> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(body.error ?? `HTTP ${response.status}`, response.status, body.diagnostics);
  }
  return body;
}

/** Thin client over the service HTTP API; the UI talks to nothing else. */
export class Api {
  constructor(public baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(this.url("/api/health"));
      return response.ok;
    } catch {
      return false;
    }
  }

  async sensors(): Promise<Catalog> {
    return asJson(await fetch(this.url("/api/sensors")));
  }

  async examples(): Promise<ExampleEntry[]> {
    return asJson(await fetch(this.url("/api/examples")));
  }

  async compile(query: QueryDocument): Promise<string> {
    const body = await asJson(
      await fetch(this.url("/api/compile"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(query),
      })
    );
    return body.sparql;
  }

  async query(query: QueryDocument): Promise<{ sparql: string; table: ResultTable }> {
    return asJson(
      await fetch(this.url("/api/query"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(query),
      })
    );
  }

  async chat(message: string, sessionId?: string, query?: QueryDocument): Promise<ChatResponse> {
    const body: Record<string, unknown> = { message };
    if (sessionId) body.sessionId = sessionId;
    if (query) body.query = query; // the turn builds on the client's document
    return asJson(
      await fetch(this.url("/api/chat"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      })
    );
  }
}
