import type {
  AlertDocument,
  AnomalyFlagDocument,
  DecisionResponse,
  EnforcementEntry,
  HealthDocument,
  HierarchyDocument,
  RenderedPolicy,
  SubmissionResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`gateway returned ${status}`);
  }
}

/** Thin typed wrapper over the gateway's JSON endpoints. */
export class ApiClient {
  constructor(public baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { 'content-type': 'application/json' },
      ...init,
    });
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body as T;
  }

  /**
   * Submit an intent sentence. A parse failure comes back as a 400 whose
   * body still has the SubmissionResponse shape, so it is returned rather
   * than thrown; the caller checks `parse` for an `error` key.
   */
  async submitIntent(
    text: string,
    options: { dryRun?: boolean; expectedVersion?: number } = {},
  ): Promise<SubmissionResponse> {
    const payload: Record<string, unknown> = { text, dry_run: options.dryRun ?? false };
    if (options.expectedVersion !== undefined) {
      payload.expected_version = options.expectedVersion;
    }
    const response = await fetch(this.baseUrl + '/intents', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    });
    const body = await response.json();
    if (!response.ok && response.status !== 400) {
      throw new ApiError(response.status, body);
    }
    return body as SubmissionResponse;
  }

  queryDecision(user: string, asset: string, time: string): Promise<DecisionResponse> {
    return this.request('/decisions/query', {
      method: 'POST',
      body: JSON.stringify({ user, asset, time }),
    });
  }

  policies(): Promise<RenderedPolicy[]> {
    return this.request('/policies');
  }

  alerts(options: { admin?: string; includeAcknowledged?: boolean } = {}): Promise<AlertDocument[]> {
    const params = new URLSearchParams();
    if (options.admin) params.set('admin', options.admin);
    if (options.includeAcknowledged) params.set('include_acknowledged', 'true');
    const suffix = params.size ? `?${params}` : '';
    return this.request(`/alerts${suffix}`);
  }

  acknowledgeAlert(alertId: string): Promise<AlertDocument> {
    return this.request(`/alerts/${alertId}/ack`, { method: 'POST' });
  }

  hierarchy(): Promise<HierarchyDocument> {
    return this.request('/hierarchy');
  }

  anomalies(): Promise<AnomalyFlagDocument[]> {
    return this.request('/telemetry/anomalies');
  }

  enforcement(): Promise<EnforcementEntry[]> {
    return this.request('/debug/enforcement');
  }

  health(): Promise<HealthDocument> {
    return this.request('/health');
  }
}
