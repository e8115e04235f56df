/** Typed client for the recommendation service JSON API. */

export type Level = 'beginner' | 'intermediate' | 'advanced';

export interface Skill {
  name: string;
  keywords: string[];
  description: string;
  score: number;
}

export interface CreatedUser {
  user_id: string;
  p: number[];
}

export interface TargetState {
  skill: string;
  level: Level;
  mastered: boolean;
}

export interface Recommendation {
  video_id: string;
  title: string;
  url: string;
  x: number[];
  score: number;
}

export interface RatingResult {
  level: Level;
  mastered: boolean;
  p: number[];
}

export interface UserProfile {
  user_id: string;
  occupation: string;
  location: string;
  education: string;
  p: number[];
  targets: Record<string, { level: Level; mastered: boolean }>;
  rated_video_ids: string[];
  skipped: string[];
  active: Record<string, string>;
}

export interface UserContext {
  occupation: string;
  location: string;
  education: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = 'unknown';
      let message = `HTTP ${response.status}`;
      try {
        const payload = (await response.json()) as { code?: string; message?: string };
        code = payload.code ?? code;
        message = payload.message ?? message;
      } catch {
        /* non-JSON error body; keep the defaults */
      }
      throw new ApiError(response.status, code, message);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  getSkills(): Promise<Skill[]> {
    return this.request('GET', '/skills');
  }

  createUser(context: UserContext): Promise<CreatedUser> {
    return this.request('POST', '/users', context);
  }

  getUser(userId: string): Promise<UserProfile> {
    return this.request('GET', `/users/${encodeURIComponent(userId)}`);
  }

  addTarget(userId: string, skill: string, level: Level): Promise<TargetState> {
    return this.request('POST', `/users/${encodeURIComponent(userId)}/skills`, { skill, level });
  }

  getRecommendation(userId: string, skill: string): Promise<Recommendation> {
    const query = new URLSearchParams({ skill });
    return this.request('GET', `/users/${encodeURIComponent(userId)}/recommendation?${query}`);
  }

  rate(userId: string, videoId: string, stars: number): Promise<RatingResult> {
    return this.request('POST', `/users/${encodeURIComponent(userId)}/ratings`, {
      video_id: videoId,
      stars,
    });
  }

  skip(userId: string, videoId: string): Promise<void> {
    return this.request('POST', `/users/${encodeURIComponent(userId)}/skips`, {
      video_id: videoId,
    });
  }
}
