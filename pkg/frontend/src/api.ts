/** Typed client for the description service. All server access goes through here. */

export interface CustomizationSettings {
  frequency_s: number;
  target_length_words: number;
  emphasis: 'general' | 'character' | 'environment' | 'instructional';
  subjectivity: 'objective' | 'subjective';
  colors: 'include' | 'exclude';
  free_form_guidelines: string;
}

export const DEFAULT_SETTINGS: CustomizationSettings = {
  frequency_s: 15,
  target_length_words: 50,
  emphasis: 'general',
  subjectivity: 'objective',
  colors: 'include',
  free_form_guidelines: '',
};

export interface Cue {
  start_s: number;
  text: string;
  word_count: number;
  flags: string[];
}

export interface TrackDoc {
  format_version: number;
  video_id: string;
  settings: CustomizationSettings;
  plan: { frequency_s: number; duration_s: number; flags: string[] };
  cues: Cue[];
  flags: string[];
}

export type JobStateName =
  | 'queued'
  | 'ingesting'
  | 'timing'
  | 'generating'
  | 'ready'
  | 'failed';

export interface JobStatus {
  job_id: string;
  state: JobStateName;
  detail: string | null;
  progress: number;
  video_id: string | null;
}

export interface SubmitRequest {
  source: { path?: string; url?: string };
  settings?: Partial<CustomizationSettings>;
  session_id?: string;
  user_id?: string;
}

export interface QuestionRequest {
  t_s: number;
  question: string;
  input_mode?: 'typed' | 'spoken';
}

export interface Exchange {
  video_id: string;
  t_s: number;
  question: string;
  input_mode: string;
  answer: string;
  question_type: string;
  asked_at: string;
  accuracy_rating: string | null;
  hint: string | null;
  error: string | null;
}

export interface Ratings {
  day?: number;
  effectiveness?: number;
  enjoyment?: number;
  immersion?: number;
  alignment?: number;
}

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = 'ApiError';
    this.status = status;
    this.detail = detail;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function fail(response: Response): Promise<never> {
  let detail = response.statusText || `status ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // non-JSON error body, keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, '');
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) await fail(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  submitVideo(req: SubmitRequest): Promise<{ job_id: string }> {
    return this.request('POST', '/videos', req);
  }

  getStatus(jobId: string): Promise<JobStatus> {
    return this.request('GET', `/videos/${encodeURIComponent(jobId)}`);
  }

  getTrack(jobId: string): Promise<TrackDoc> {
    return this.request('GET', `/videos/${encodeURIComponent(jobId)}/track`);
  }

  regenerate(
    jobId: string,
    settings: Partial<CustomizationSettings>
  ): Promise<{ job_id: string; cached?: boolean }> {
    return this.request('POST', `/videos/${encodeURIComponent(jobId)}/regenerate`, {
      settings,
    });
  }

  askQuestion(jobId: string, req: QuestionRequest): Promise<Exchange> {
    return this.request('POST', `/videos/${encodeURIComponent(jobId)}/questions`, req);
  }

  submitRatings(sessionId: string, ratings: Ratings): Promise<void> {
    return this.request('POST', `/sessions/${encodeURIComponent(sessionId)}/ratings`, ratings);
  }

  /** Poll a job at `pollMs` until it reaches ready or failed. */
  async waitUntilReady(jobId: string, pollMs = 1000): Promise<JobStatus> {
    for (;;) {
      const status = await this.getStatus(jobId);
      if (status.state === 'ready' || status.state === 'failed') return status;
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }
}
