/** Dashboard acceptance: onboarding plus a full rate-and-advance loop against
 * a live local service instance, asserting after every step that the session
 * view model equals the server's profile (refetch-and-compare). */

import { spawn, ChildProcess } from 'node:child_process';
import { mkdtempSync, mkdirSync, writeFileSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, resolve } from 'node:path';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient, Level, UserProfile } from '../src/api.js';
import { Session } from '../src/session.js';

const PORT = 8472;
const BASE_URL = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(__dirname, '..', '..');

let server: ChildProcess;
let storeDir: string;

function buildStore(): string {
  const dir = mkdtempSync(join(tmpdir(), 'skillrec-store-'));
  const skills = [
    { name: 'python', keywords: ['python'], description: 'Python programming.', score: 2.0 },
    { name: 'sql', keywords: ['sql'], description: 'SQL databases.', score: 1.0 },
  ];
  writeFileSync(join(dir, 'skills.json'), JSON.stringify(skills, null, 2));
  const lines: string[] = [];
  for (const skill of ['python', 'sql']) {
    for (const [levelIndex, level] of (['beginner', 'intermediate', 'advanced'] as const).entries()) {
      for (let i = 0; i < 3; i += 1) {
        lines.push(
          JSON.stringify({
            id: `${skill}-l${levelIndex}-v${i}`,
            source: 'youtube-like',
            title: `${skill} ${level} video ${i}`,
            target_skill: skill,
            url: `https://videos.example/${skill}/${levelIndex}/${i}`,
            length_s: 300 + 150 * i + 40 * levelIndex,
            relevancy_score: 1.0 / (i + 1),
            level,
            likes: 40 + 30 * i,
            dislikes: 5,
            view_count: 900 + 100 * i,
            rating: 3.0 + 0.5 * i,
            text_similarity: 0.2 + 0.3 * i,
            transcript: '',
            description: '',
          }),
        );
      }
    }
  }
  writeFileSync(join(dir, 'catalog.jsonl'), lines.join('\n') + '\n');
  mkdirSync(join(dir, 'users'), { recursive: true });
  return dir;
}

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      const response = await fetch(`${BASE_URL}/skills`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error('service did not become ready');
}

beforeAll(async () => {
  storeDir = buildStore();
  server = spawn(
    'python3',
    ['-m', 'skillrec', 'serve', '--store', storeDir, '--port', String(PORT)],
    {
      env: { ...process.env, PYTHONPATH: join(REPO_ROOT, 'src') },
      stdio: 'ignore',
    },
  );
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill();
  if (storeDir) rmSync(storeDir, { recursive: true, force: true });
});

function viewMatchesProfile(session: Session, profile: UserProfile): void {
  expect(session.preferences).toEqual(profile.p);
  expect(session.targets.size).toBe(Object.keys(profile.targets).length);
  for (const [skill, state] of Object.entries(profile.targets)) {
    const view = session.target(skill);
    expect(view.level).toBe(state.level);
    expect(view.mastered).toBe(state.mastered);
    if (view.recommendation) {
      expect(profile.active[skill]).toBe(view.recommendation.video_id);
    }
  }
}

describe('dashboard against a live service', () => {
  it('onboards, rates through to mastery, and never repeats a video', async () => {
    const api = new ApiClient(BASE_URL);
    const session = new Session(api);

    await session.onboard(
      { occupation: 'data engineer', location: 'hannover', education: 'msc' },
      [
        { skill: 'python', level: 'beginner' },
        { skill: 'sql', level: 'beginner' },
      ],
    );
    expect(session.userId).toBeTruthy();
    viewMatchesProfile(session, await api.getUser(session.userId!));

    // full rate-and-advance loop: beginner -> intermediate -> advanced -> mastered
    const shown: string[] = [];
    const expectedLevels: Level[] = ['intermediate', 'advanced', 'advanced'];
    for (const [step, expected] of expectedLevels.entries()) {
      await session.loadRecommendation('python');
      const view = session.target('python');
      expect(view.recommendation).not.toBeNull();
      shown.push(view.recommendation!.video_id);

      await session.rate('python', 5);
      const profile = await api.getUser(session.userId!);
      viewMatchesProfile(session, profile);
      expect(session.target('python').level).toBe(expected);
      expect(session.target('python').mastered).toBe(step === expectedLevels.length - 1);
    }
    expect(new Set(shown).size).toBe(shown.length);
    expect(session.target('python').status).toBe('mastered');

    // skip flow on the second skill: a skipped video is never shown again
    await session.loadRecommendation('sql');
    const first = session.target('sql').recommendation!.video_id;
    await session.skip('sql');
    const second = session.target('sql').recommendation!.video_id;
    expect(second).not.toBe(first);
    await session.skip('sql');
    const third = session.target('sql').recommendation;
    if (third) {
      expect([first, second]).not.toContain(third.video_id);
    } else {
      expect(session.target('sql').status).toBe('exhausted');
    }
    viewMatchesProfile(session, await api.getUser(session.userId!));

    // low ratings never advance the level
    if (session.target('sql').recommendation) {
      await session.rate('sql', 2);
      const profile = await api.getUser(session.userId!);
      expect(profile.targets.sql.level).toBe('beginner');
      viewMatchesProfile(session, profile);
    }
  }, 30_000);

  it('session state converges to the server profile after errors', async () => {
    const api = new ApiClient(BASE_URL);
    const session = new Session(api);
    await session.onboard(
      { occupation: 'analyst', location: 'berlin', education: 'bsc' },
      [{ skill: 'python', level: 'advanced' }],
    );
    // drain the 3 advanced videos, then the pool is exhausted
    for (let i = 0; i < 3; i += 1) {
      await session.loadRecommendation('python');
      const view = session.target('python');
      if (view.mastered) break;
      await session.rate('python', 1); // low rating: stay at advanced, consume video
    }
    await session.loadRecommendation('python');
    expect(session.target('python').status).toBe('exhausted');
    viewMatchesProfile(session, await api.getUser(session.userId!));
  }, 30_000);
});
