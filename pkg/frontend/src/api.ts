/** Typed client for the annotation service's JSON endpoints. */

export type TagValue = "wal" | "gof" | "wal-gof";

export const TAGS: readonly TagValue[] = ["wal", "gof", "wal-gof"];

export interface WorkItem {
  item_id: string;
  word: string;
  batch: number;
}

export interface LabelAck {
  item_id: string;
  status: string;
}

export interface Progress {
  total: number;
  by_status: Record<string, number>;
  decided_tags: {
    counts: Record<string, number>;
    fractions: Record<string, number>;
  };
}

export interface DisagreementVote {
  annotator: string;
  tag: string;
}

export interface Disagreement {
  item_id: string;
  word: string;
  votes: DisagreementVote[];
}

export interface AdjudicationAck {
  item_id: string;
  status: string;
  outcome: string;
  adjudicator: string;
}

export interface AgreementReport {
  pairwise: { annotators: string[]; agreement: number | null }[];
  full_consensus: number;
  no_consensus: number;
}

/** Error carrying the server's machine-readable code; status 0 means the
 * server was unreachable. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }

  get offline(): boolean {
    return this.status === 0;
  }

  get conflict(): boolean {
    return this.status === 409;
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, "offline", `server unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let code = "http";
      let detail = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as { error?: string; detail?: string };
        if (body.error) code = body.error;
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async annotators(): Promise<string[]> {
    const data = await this.request<{ annotators: string[] }>("/api/annotators");
    return data.annotators;
  }

  async nextItems(annotator: string, limit = 10): Promise<WorkItem[]> {
    const query = `annotator=${encodeURIComponent(annotator)}&limit=${limit}`;
    const data = await this.request<{ items: WorkItem[] }>(`/api/items/next?${query}`);
    return data.items;
  }

  submitLabel(
    itemId: string,
    annotator: string,
    tag: TagValue,
    overwrite = false,
  ): Promise<LabelAck> {
    return this.post<LabelAck>("/api/labels", {
      item_id: itemId,
      annotator,
      tag,
      overwrite,
    });
  }

  progress(): Promise<Progress> {
    return this.request<Progress>("/api/progress");
  }

  async disagreements(): Promise<Disagreement[]> {
    const data = await this.request<{ items: Disagreement[] }>("/api/disagreements");
    return data.items;
  }

  adjudicate(itemId: string, tag: TagValue, adjudicator: string): Promise<AdjudicationAck> {
    return this.post<AdjudicationAck>("/api/adjudicate", {
      item_id: itemId,
      tag,
      adjudicator,
    });
  }

  agreement(): Promise<AgreementReport> {
    return this.request<AgreementReport>("/api/agreement");
  }
}
