/** DOM rendering: onboarding form and the learning tab. No framework, just
 * small render functions re-invoked after every settled request. */

import { Level, Skill } from './api.js';
import { OnboardingChoice, Session, TargetView } from './session.js';

const LEVELS: Level[] = ['beginner', 'intermediate', 'advanced'];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export interface OnboardingResult {
  occupation: string;
  location: string;
  education: string;
  choices: OnboardingChoice[];
}

export function renderOnboarding(
  root: HTMLElement,
  skills: Skill[],
  onSubmit: (result: OnboardingResult) => void,
): void {
  root.replaceChildren();
  const form = el('form', 'onboarding');
  form.append(el('h2', '', 'Set up your learning profile'));

  const contextFields: Record<string, HTMLInputElement> = {};
  for (const name of ['occupation', 'location', 'education'] as const) {
    const label = el('label', 'field', `${name[0].toUpperCase()}${name.slice(1)} `);
    const input = el('input');
    input.name = name;
    input.required = true;
    label.append(input);
    form.append(label);
    contextFields[name] = input;
  }

  form.append(el('h3', '', 'Skills to master'));
  const rows: { checkbox: HTMLInputElement; select: HTMLSelectElement; skill: Skill }[] = [];
  for (const skill of skills) {
    const row = el('div', 'skill-row');
    const checkbox = el('input');
    checkbox.type = 'checkbox';
    checkbox.value = skill.name;
    const select = el('select');
    for (const level of LEVELS) {
      const option = el('option', '', level);
      option.value = level;
      select.append(option);
    }
    const label = el('label', 'skill-name', skill.name);
    label.title = skill.description;
    row.append(checkbox, label, select);
    form.append(row);
    rows.push({ checkbox, select, skill });
  }

  const submit = el('button', 'primary', 'Start learning');
  submit.type = 'submit';
  form.append(submit);

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    onSubmit({
      occupation: contextFields.occupation.value.trim(),
      location: contextFields.location.value.trim(),
      education: contextFields.education.value.trim(),
      choices: rows
        .filter((row) => row.checkbox.checked)
        .map((row) => ({ skill: row.skill.name, level: row.select.value as Level })),
    });
  });

  root.append(form);
}

export function renderLearning(root: HTMLElement, session: Session, rerender: () => void): void {
  root.replaceChildren();
  const header = el('div', 'learning-header');
  header.append(el('h2', '', 'Your learning tab'));
  header.append(
    el('p', 'preferences', `Preference weights: [${session.preferences.map((v) => v.toFixed(3)).join(', ')}]`),
  );
  root.append(header);

  if (session.targets.size === 0) {
    root.append(el('p', 'empty-state', 'No target skills yet. Add skills to start learning.'));
    return;
  }

  for (const view of session.targets.values()) {
    root.append(renderTargetCard(view, session, rerender));
  }
}

function renderTargetCard(view: TargetView, session: Session, rerender: () => void): HTMLElement {
  const card = el('section', `card status-${view.status}`);
  const title = el('div', 'card-title');
  title.append(el('h3', '', view.skill));
  title.append(el('span', `badge level-${view.level}`, view.level));
  if (view.mastered) {
    title.append(el('span', 'badge mastered', 'mastered \u{1F389}'));
  }
  card.append(title);

  if (view.mastered) {
    card.append(el('p', '', 'You reached the highest mastery level for this skill.'));
    return card;
  }

  if (view.status === 'exhausted') {
    card.append(el('p', '', 'Catalog exhausted: no more videos at this level.'));
    return card;
  }

  if (view.error) {
    card.append(el('p', 'error', view.error));
  }

  const recommendation = view.recommendation;
  if (!recommendation) {
    const load = el('button', 'primary', 'Get recommendation');
    load.disabled = view.pending;
    load.addEventListener('click', async () => {
      await session.loadRecommendation(view.skill);
      rerender();
    });
    card.append(load);
    return card;
  }

  const link = el('a', 'video-link', recommendation.title);
  link.href = recommendation.url;
  link.target = '_blank';
  link.rel = 'noopener';
  card.append(link);
  card.append(el('p', 'score', `match score ${recommendation.score.toFixed(3)}`));

  const stars = el('div', 'stars');
  for (let value = 1; value <= 5; value += 1) {
    const star = el('button', 'star', '★'.repeat(1));
    star.title = `${value} star${value > 1 ? 's' : ''}`;
    star.disabled = view.pending;
    star.addEventListener('click', async () => {
      await session.rate(view.skill, value);
      rerender();
    });
    stars.append(star);
  }
  card.append(stars);

  const skipButton = el('button', 'secondary', 'Show me another video');
  skipButton.disabled = view.pending;
  skipButton.addEventListener('click', async () => {
    await session.skip(view.skill);
    rerender();
  });
  card.append(skipButton);
  return card;
}
