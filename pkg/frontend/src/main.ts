import { ApiClient } from './api.js';
import { describeError, Session } from './session.js';
import { renderLearning, renderOnboarding } from './ui.js';

const DEFAULT_BASE_URL = 'http://127.0.0.1:8000';

function baseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('api');
  return (fromQuery ?? DEFAULT_BASE_URL).replace(/\/$/, '');
}

async function boot(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) {
    throw new Error('missing #app element');
  }
  const api = new ApiClient(baseUrl());
  const session = new Session(api);

  let skills;
  try {
    skills = await api.getSkills();
  } catch (error) {
    root.textContent = `Cannot reach the recommendation service at ${api.baseUrl}: ${describeError(error)}`;
    return;
  }

  const rerender = () => renderLearning(root, session, rerender);

  renderOnboarding(root, skills, async (result) => {
    try {
      await session.onboard(
        { occupation: result.occupation, location: result.location, education: result.education },
        result.choices,
      );
    } catch (error) {
      root.prepend(document.createTextNode(describeError(error)));
      return;
    }
    for (const choice of result.choices) {
      await session.loadRecommendation(choice.skill);
    }
    rerender();
  });
}

void boot();
