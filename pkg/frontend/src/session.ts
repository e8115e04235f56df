/** Session view model.
 *
 * The server is the single source of truth: every mutation is followed by a
 * profile refetch, and the view state is rebuilt from the response. The
 * session additionally remembers every video id it has displayed per skill
 * so a recommendation is never shown twice within the session.
 */

import { ApiClient, ApiError, Level, Recommendation, UserContext } from './api.js';

export type TargetStatus = 'idle' | 'ready' | 'mastered' | 'exhausted' | 'error';

export interface TargetView {
  skill: string;
  level: Level;
  mastered: boolean;
  status: TargetStatus;
  recommendation: Recommendation | null;
  pending: boolean;
  error: string | null;
}

export interface OnboardingChoice {
  skill: string;
  level: Level;
}

export class Session {
  userId: string | null = null;
  context: UserContext | null = null;
  preferences: number[] = [];
  targets = new Map<string, TargetView>();
  private shown = new Map<string, Set<string>>();

  constructor(private readonly api: ApiClient) {}

  /** Create the user and register every chosen skill.
   *
   * Per-target failures (e.g. a duplicate) are recorded on the target view
   * instead of aborting the rest of the onboarding.
   */
  async onboard(context: UserContext, choices: OnboardingChoice[]): Promise<void> {
    const created = await this.api.createUser(context);
    this.userId = created.user_id;
    this.context = context;
    this.preferences = created.p;
    for (const choice of choices) {
      try {
        await this.api.addTarget(created.user_id, choice.skill, choice.level);
      } catch (error) {
        this.targets.set(choice.skill, {
          skill: choice.skill,
          level: choice.level,
          mastered: false,
          status: 'error',
          recommendation: null,
          pending: false,
          error: describeError(error),
        });
      }
    }
    await this.syncProfile();
  }

  /** Pull the server profile and reconcile every target view with it. */
  async syncProfile(): Promise<void> {
    if (!this.userId) {
      throw new Error('session has no user yet');
    }
    const profile = await this.api.getUser(this.userId);
    this.preferences = profile.p;
    for (const [skill, state] of Object.entries(profile.targets)) {
      const existing = this.targets.get(skill);
      this.targets.set(skill, {
        skill,
        level: state.level,
        mastered: state.mastered,
        status: state.mastered ? 'mastered' : (existing?.status ?? 'idle'),
        recommendation: state.mastered ? null : (existing?.recommendation ?? null),
        pending: existing?.pending ?? false,
        error: existing?.status === 'error' ? existing.error : null,
      });
    }
  }

  target(skill: string): TargetView {
    const view = this.targets.get(skill);
    if (!view) {
      throw new Error(`unknown target skill: ${skill}`);
    }
    return view;
  }

  shownVideos(skill: string): Set<string> {
    let set = this.shown.get(skill);
    if (!set) {
      set = new Set();
      this.shown.set(skill, set);
    }
    return set;
  }

  /** Fetch the next recommendation for the skill and display it. */
  async loadRecommendation(skill: string): Promise<void> {
    const view = this.target(skill);
    if (view.pending || view.mastered) {
      return;
    }
    view.pending = true;
    try {
      const recommendation = await this.api.getRecommendation(this.requireUser(), skill);
      const seen = this.shownVideos(skill);
      if (view.recommendation?.video_id !== recommendation.video_id
          && seen.has(recommendation.video_id)) {
        throw new Error(`video ${recommendation.video_id} was already shown for ${skill}`);
      }
      seen.add(recommendation.video_id);
      view.recommendation = recommendation;
      view.status = 'ready';
      view.error = null;
    } catch (error) {
      this.applyFetchFailure(view, error);
    } finally {
      view.pending = false;
    }
  }

  /** Send the star rating for the displayed video, then resync and refetch. */
  async rate(skill: string, stars: number): Promise<void> {
    const view = this.target(skill);
    if (view.pending) {
      return;
    }
    const current = view.recommendation;
    if (!current) {
      throw new Error(`no active recommendation for ${skill}`);
    }
    view.pending = true;
    try {
      const result = await this.api.rate(this.requireUser(), current.video_id, stars);
      this.preferences = result.p;
      view.level = result.level;
      view.mastered = result.mastered;
      view.recommendation = null;
      view.status = result.mastered ? 'mastered' : 'idle';
      view.error = null;
    } catch (error) {
      view.error = describeError(error);
      view.status = 'error';
      view.pending = false;
      return;
    }
    view.pending = false;
    await this.syncProfile();
    if (!view.mastered) {
      await this.loadRecommendation(skill);
    }
  }

  /** Reject the displayed video and ask for a different one. */
  async skip(skill: string): Promise<void> {
    const view = this.target(skill);
    if (view.pending) {
      return;
    }
    const current = view.recommendation;
    if (!current) {
      throw new Error(`no active recommendation for ${skill}`);
    }
    view.pending = true;
    try {
      await this.api.skip(this.requireUser(), current.video_id);
      view.recommendation = null;
      view.status = 'idle';
      view.error = null;
    } catch (error) {
      view.error = describeError(error);
      view.status = 'error';
      view.pending = false;
      return;
    }
    view.pending = false;
    await this.syncProfile();
    await this.loadRecommendation(skill);
  }

  private applyFetchFailure(view: TargetView, error: unknown): void {
    if (error instanceof ApiError && error.status === 409) {
      view.mastered = true;
      view.status = 'mastered';
      view.recommendation = null;
    } else if (error instanceof ApiError && error.status === 410) {
      view.status = 'exhausted';
      view.recommendation = null;
    } else {
      view.status = 'error';
      view.error = describeError(error);
    }
  }

  private requireUser(): string {
    if (!this.userId) {
      throw new Error('session has no user yet');
    }
    return this.userId;
  }
}

export function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.code}: ${error.message}`;
  }
  return error instanceof Error ? error.message : String(error);
}
