/**
 * Page bootstrap: a wizard tab for researchers and an approvals tab for
 * depositors. The API base URL comes from the page's query string
 * (?api=http://host:port) and defaults to the page origin.
 */

import { DataTagsClient } from './api.js';
import { ApprovalDashboard } from './approvals.js';
import { InterviewWizard } from './wizard.js';

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('api');
  return fromQuery ?? window.location.origin;
}

function activate(tab: string): void {
  for (const section of document.querySelectorAll<HTMLElement>('[data-tab-panel]')) {
    section.hidden = section.dataset.tabPanel !== tab;
  }
  for (const button of document.querySelectorAll<HTMLElement>('[data-tab]')) {
    button.classList.toggle('active', button.dataset.tab === tab);
  }
}

export function boot(): void {
  const client = new DataTagsClient(apiBase());

  const wizardRoot = document.querySelector<HTMLElement>('#wizard');
  const approvalsRoot = document.querySelector<HTMLElement>('#approval-queue');
  const loginForm = document.querySelector<HTMLFormElement>('#approvals-login');
  if (!wizardRoot || !approvalsRoot || !loginForm) {
    throw new Error('page shell is missing its mount points');
  }

  const wizard = new InterviewWizard(wizardRoot, client, {
    onStartDeposit: (state) => {
      const tag = state.result?.tag ?? '';
      window.alert(
        `Deposit handoff: continue in your repository tooling with tag "${tag}" ` +
          `(tree version ${state.tree_version}).`,
      );
    },
  });
  void wizard.start();

  const dashboard = new ApprovalDashboard(approvalsRoot, client);
  loginForm.addEventListener('submit', (event) => {
    event.preventDefault();
    const username = (loginForm.querySelector('[name=username]') as HTMLInputElement).value;
    const password = (loginForm.querySelector('[name=password]') as HTMLInputElement).value;
    const status = loginForm.querySelector<HTMLElement>('.login-status');
    dashboard
      .login(username, password)
      .then(() => {
        if (status) status.textContent = 'Signed in.';
      })
      .catch((error: unknown) => {
        if (status) status.textContent = error instanceof Error ? error.message : String(error);
      });
  });

  for (const button of document.querySelectorAll<HTMLElement>('[data-tab]')) {
    button.addEventListener('click', () => activate(button.dataset.tab ?? 'wizard'));
  }
  activate('wizard');
}

if (typeof document !== 'undefined' && document.readyState !== 'loading') {
  boot();
} else if (typeof document !== 'undefined') {
  document.addEventListener('DOMContentLoaded', boot);
}
