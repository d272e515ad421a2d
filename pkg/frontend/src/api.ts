/**
 * Typed client for the solver service API (/api/v1).
 * All numeric model output originates here; the UI never computes model
 * quantities client-side.
 */

export interface ParamSchemaEntry {
  name: string;
  units: string;
  default: number;
  range: [number, number] | null;
  scale: 'linear' | 'log';
  group: string;
  addon: 'externality' | 'uncertainty' | null;
  tooltip: string;
}

export interface SchemaDocument {
  parameters: ParamSchemaEntry[];
  labor_modes: string[];
  belief_spec: { addon: string; default: BeliefCandidate[]; tooltip: string };
}

export interface BeliefCandidate {
  zeta: number;
  prob: number;
}

export type SolveMode = 'deterministic' | 'externality' | 'uncertainty';

export interface SubmitResponse {
  job_id: string;
  warnings: string[];
}

export interface Violation {
  field: string;
  message: string;
}

export interface JobStatus {
  job_id: string;
  mode: SolveMode;
  status: 'queued' | 'running' | 'done' | 'failed';
  iteration?: number;
  value?: number;
  error?: string;
  warnings: string[];
  summary?: RunSummary;
}

export interface RunSummary {
  value: number;
  converged: boolean;
  iterations: number;
  final_f: number;
  year_f_half: number | null;
  year_f_full: number | null;
  peak_growth: number;
}

export interface ScenarioSeries {
  scenario_id: number;
  prob: number;
  zeta: number;
  series: Record<string, number[]>;
  info_states: number[];
}

export interface TrajectoryDocument {
  mode: SolveMode;
  tau_plan: number;
  value: number;
  converged: boolean;
  columns: string[];
  scenarios: ScenarioSeries[];
}

export interface ProgressRecord {
  iteration: number;
  value: number;
  grad_norm: number;
  step_size: number;
}

export interface ScenarioListEntry {
  name: string;
  run_id: string;
  mode: SolveMode;
  summary: RunSummary;
}

export interface CompareDocument {
  names: string[];
  truncated: boolean;
  columns: string[];
  rows: number[][];
}

export class ValidationError extends Error {
  constructor(public violations: Violation[]) {
    super(violations.map((v) => `${v.field}: ${v.message}`).join('; '));
  }
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.url(path));
    if (!resp.ok) {
      throw new Error(`GET ${path} failed: ${resp.status} ${await resp.text()}`);
    }
    return (await resp.json()) as T;
  }

  async schema(): Promise<SchemaDocument> {
    return this.getJson('/schema');
  }

  async submitSolve(
    config: Record<string, unknown>,
    mode: SolveMode,
    solver?: Record<string, number>,
  ): Promise<SubmitResponse> {
    const resp = await fetch(this.url('/solve'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ config, mode, solver: solver ?? {} }),
    });
    if (resp.status === 422) {
      const body = await resp.json();
      throw new ValidationError(body.violations ?? []);
    }
    if (!resp.ok) {
      throw new Error(`solve submission failed: ${resp.status}`);
    }
    return (await resp.json()) as SubmitResponse;
  }

  async jobStatus(jobId: string): Promise<JobStatus> {
    return this.getJson(`/jobs/${jobId}`);
  }

  async trajectory(jobId: string): Promise<TrajectoryDocument> {
    return this.getJson(`/jobs/${jobId}/trajectory`);
  }

  /** Stream per-iteration progress records until the job finishes. */
  async streamProgress(
    jobId: string,
    onRecord: (r: ProgressRecord) => void,
  ): Promise<void> {
    const resp = await fetch(this.url(`/jobs/${jobId}/progress`));
    if (!resp.ok || !resp.body) {
      throw new Error(`progress stream failed: ${resp.status}`);
    }
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = '';
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let nl;
      while ((nl = buffer.indexOf('\n')) >= 0) {
        const line = buffer.slice(0, nl).trim();
        buffer = buffer.slice(nl + 1);
        if (line) onRecord(JSON.parse(line) as ProgressRecord);
      }
    }
  }

  async saveScenario(name: string, jobId: string): Promise<void> {
    const resp = await fetch(this.url('/scenarios'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ name, job_id: jobId }),
    });
    if (resp.status === 409) {
      throw new Error(`scenario name already exists`);
    }
    if (!resp.ok) {
      throw new Error(`scenario save failed: ${resp.status}`);
    }
  }

  async listScenarios(): Promise<ScenarioListEntry[]> {
    return this.getJson('/scenarios');
  }

  async scenarioTrajectory(
    name: string,
  ): Promise<{ name: string; scenarios: { scenario_id: number; series: Record<string, number[]> }[] }> {
    return this.getJson(`/scenarios/${encodeURIComponent(name)}/trajectory`);
  }

  async compare(names: string[]): Promise<CompareDocument> {
    return this.getJson(`/compare?names=${encodeURIComponent(names.join(','))}`);
  }

  async waitForJob(
    jobId: string,
    pollMs = 250,
    timeoutMs = 600_000,
  ): Promise<JobStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.jobStatus(jobId);
      if (status.status === 'done' || status.status === 'failed') return status;
      if (Date.now() > deadline) throw new Error(`job ${jobId} timed out`);
      await new Promise((r) => setTimeout(r, pollMs));
    }
  }
}
