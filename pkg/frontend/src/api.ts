// Typed client for the munidss HTTP API. The workbench performs no influence
// or rating arithmetic of its own: every displayed number originates here.

export interface ProfilePayload {
  mf_type: string;
  sed_level: string;
  rural_settlement_count: number;
  mf_type_detail?: string;
}

export interface IndicatorPayload {
  id: string;
  name: string;
  kind: "quantitative" | "qualitative";
  current_value: number | string;
  unit?: string;
}

export interface TargetPayload {
  id: string;
  name: string;
}

export interface EstimatePayload {
  expert_id: string;
  source: string;
  sink: string;
  value: number;
}

export interface RangePayload {
  indicator_id: string;
  lo?: number;
  hi?: number;
  allowed?: string[];
}

export interface ThresholdsPayload {
  critical: number;
  significant: number;
  moderate: number;
}

export interface ProjectPayload {
  id: string;
  revision: number;
  profile: ProfilePayload;
  indicators: IndicatorPayload[];
  targets: TargetPayload[];
  estimates: EstimatePayload[];
  ranges: RangePayload[];
  criticality_config: Record<string, ThresholdsPayload>;
  aggregation_policy: string;
}

export interface RatingEntryPayload {
  indicator_id: string;
  rank: number;
  total_impact: number;
  direct_impact: number;
  relevance: number;
  criticality: string;
}

export interface RatingPayload {
  target_id: string;
  entries: RatingEntryPayload[];
}

export interface WhatIfResponsePayload {
  deltas: Record<string, number>;
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
    readonly details?: unknown,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ApiClient {
  getProject(projectId: string): Promise<ProjectPayload>;
  putProject(project: ProjectPayload): Promise<ProjectPayload>;
  postEstimates(
    projectId: string,
    revision: number,
    estimates: EstimatePayload[],
  ): Promise<ProjectPayload>;
  getRating(projectId: string, targetId: string): Promise<RatingPayload>;
  postWhatIf(projectId: string, deltas: Record<string, number>): Promise<WhatIfResponsePayload>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class HttpApiClient implements ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON body; handled below
    }
    if (!response.ok) {
      const err = (body ?? {}) as { code?: string; message?: string; details?: unknown };
      throw new ApiError(
        err.code ?? "INTERNAL",
        err.message ?? `request failed with status ${response.status}`,
        response.status,
        err.details,
      );
    }
    return body as T;
  }

  getProject(projectId: string): Promise<ProjectPayload> {
    return this.request(`/projects/${encodeURIComponent(projectId)}`);
  }

  putProject(project: ProjectPayload): Promise<ProjectPayload> {
    return this.request(`/projects/${encodeURIComponent(project.id)}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(project),
    });
  }

  postEstimates(
    projectId: string,
    revision: number,
    estimates: EstimatePayload[],
  ): Promise<ProjectPayload> {
    return this.request(`/projects/${encodeURIComponent(projectId)}/estimates`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ revision, estimates }),
    });
  }

  getRating(projectId: string, targetId: string): Promise<RatingPayload> {
    return this.request(
      `/projects/${encodeURIComponent(projectId)}/ratings/${encodeURIComponent(targetId)}`,
    );
  }

  postWhatIf(projectId: string, deltas: Record<string, number>): Promise<WhatIfResponsePayload> {
    return this.request(`/projects/${encodeURIComponent(projectId)}/whatif`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ deltas }),
    });
  }
}
