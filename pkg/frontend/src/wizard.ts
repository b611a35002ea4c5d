/**
 * Classification wizard: steps through the interview session endpoints and
 * renders the current question, the answered trail with undo, and on a
 * terminal state the tag card with its legal bases and consequence rows.
 *
 * All state comes from the server; the browser never computes a tag. On a
 * network failure the session id is kept and a retry banner is shown.
 */

import { DataTagsClient, SessionState } from './api.js';

const TAG_COLORS: Record<string, string> = {
  blue: '#2b6cb0',
  green: '#2f855a',
  yellow: '#b7791f',
  orange: '#c05621',
  purple: '#6b46c1',
  red: '#c53030',
  notag: '#4a5568',
};

const CONSEQUENCE_AREAS: Array<[string, string]> = [
  ['identification_and_authentication', 'Identification and authentication'],
  ['read_and_download_permissions', 'Read and download permissions'],
  ['storage_and_transmission', 'Storage and transmission'],
  ['key_storage', 'Key storage'],
];

export interface WizardOptions {
  onStartDeposit?: (state: SessionState) => void;
}

export class InterviewWizard {
  private state: SessionState | null = null;

  private pendingError: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: DataTagsClient,
    private readonly options: WizardOptions = {},
  ) {}

  get sessionId(): string | null {
    return this.state?.session_id ?? null;
  }

  get currentState(): SessionState | null {
    return this.state;
  }

  async start(): Promise<void> {
    await this.transition(() =>
      this.state ? this.client.getSession(this.state.session_id) : this.client.createSession(),
    );
  }

  async answer(value: 'yes' | 'no'): Promise<void> {
    if (!this.state || this.state.terminal) return;
    await this.transition(() => this.client.answer(this.state!.session_id, value));
  }

  async undo(): Promise<void> {
    if (!this.state || this.state.trail.length === 0) return;
    await this.transition(() => this.client.undo(this.state!.session_id));
  }

  private async transition(action: () => Promise<SessionState>): Promise<void> {
    try {
      this.state = await action();
      this.pendingError = null;
    } catch (error) {
      this.pendingError = error instanceof Error ? error.message : String(error);
    }
    this.render();
  }

  render(): void {
    this.root.innerHTML = '';
    if (this.pendingError !== null) {
      this.root.appendChild(this.renderRetryBanner());
      return;
    }
    if (!this.state) return;
    if (this.state.terminal && this.state.result) {
      this.root.appendChild(this.renderResult());
    } else if (this.state.question) {
      this.root.appendChild(this.renderQuestion());
    }
    if (this.state.trail.length > 0) {
      this.root.appendChild(this.renderTrail());
    }
  }

  private renderRetryBanner(): HTMLElement {
    const banner = el('div', 'retry-banner');
    banner.appendChild(el('p', 'retry-message', `Service unreachable: ${this.pendingError}`));
    const button = el('button', 'retry', 'Retry');
    button.addEventListener('click', () => void this.start());
    banner.appendChild(button);
    return banner;
  }

  private renderQuestion(): HTMLElement {
    const question = this.state!.question!;
    const card = el('div', 'question-card');
    card.dataset.questionId = question.id;
    card.appendChild(el('p', 'prompt', question.prompt));
    if (question.help) {
      card.appendChild(el('p', 'help', question.help));
    }
    const controls = el('div', 'controls');
    const yes = el('button', 'answer-yes', 'Yes');
    yes.addEventListener('click', () => void this.answer('yes'));
    const no = el('button', 'answer-no', 'No');
    no.addEventListener('click', () => void this.answer('no'));
    controls.append(yes, no);
    if (this.state!.trail.length > 0) {
      const back = el('button', 'undo', 'Back');
      back.addEventListener('click', () => void this.undo());
      controls.appendChild(back);
    }
    card.appendChild(controls);
    return card;
  }

  private renderResult(): HTMLElement {
    const result = this.state!.result!;
    const card = el('div', `result-card tag-${result.tag}`);
    card.dataset.tag = result.tag;
    card.style.borderColor = TAG_COLORS[result.tag] ?? '#4a5568';

    const heading = el('h2', 'tag-label', result.label);
    heading.style.color = TAG_COLORS[result.tag] ?? '#4a5568';
    card.appendChild(heading);
    card.appendChild(el('p', 'description', result.description));
    if (result.note) {
      card.appendChild(el('p', 'note', result.note));
    }

    if (result.legal_bases.length > 0) {
      const list = el('ul', 'legal-bases');
      for (const basis of result.legal_bases) {
        list.appendChild(el('li', 'legal-basis', `${basis.instrument} ${basis.provision}: ${basis.note}`));
      }
      card.appendChild(list);
    }

    if (result.consequences) {
      const table = document.createElement('table');
      table.className = 'consequences';
      for (const [key, title] of CONSEQUENCE_AREAS) {
        const row = document.createElement('tr');
        row.dataset.area = key;
        const th = document.createElement('th');
        th.textContent = title;
        const td = document.createElement('td');
        td.textContent = result.consequences[key as keyof typeof result.consequences] ?? '';
        row.append(th, td);
        table.appendChild(row);
      }
      card.appendChild(table);
    } else {
      card.appendChild(
        el('p', 'dpo-referral', 'Refer this dataset to your Data Protection Officer before depositing.'),
      );
    }

    const controls = el('div', 'controls');
    const back = el('button', 'undo', 'Back');
    back.addEventListener('click', () => void this.undo());
    controls.appendChild(back);
    if (result.consequences) {
      const deposit = el('button', 'start-deposit', 'Start deposit');
      deposit.addEventListener('click', () => this.options.onStartDeposit?.(this.state!));
      controls.appendChild(deposit);
    }
    card.appendChild(controls);
    return card;
  }

  private renderTrail(): HTMLElement {
    const list = document.createElement('ol');
    list.className = 'trail';
    for (const entry of this.state!.trail) {
      list.appendChild(el('li', 'trail-entry', `${entry.prompt} — ${entry.answer}`));
    }
    return list;
  }
}

function el(tagName: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tagName);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}
