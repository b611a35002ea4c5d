/**
 * Approval dashboard for depositors: list pending access requests and
 * decide them. For the two consent-scoped tags the decision form requires a
 * criterion note; submission is blocked client-side when it is missing and
 * the server's rejection is surfaced inline when it slips through anyway.
 */

import { ApiError, DataTagsClient, PendingRequest } from './api.js';

const NOTE_REQUIRED_TAGS = new Set(['orange', 'purple']);

export class ApprovalDashboard {
  private token: string | null = null;

  private requests: PendingRequest[] = [];

  private errors: Map<string, string> = new Map();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: DataTagsClient,
  ) {}

  async login(username: string, password: string): Promise<void> {
    const session = await this.client.login(username, password);
    this.token = session.token;
    await this.refresh();
  }

  useToken(token: string): Promise<void> {
    this.token = token;
    return this.refresh();
  }

  async refresh(): Promise<void> {
    if (!this.token) return;
    const body = await this.client.pendingRequests(this.token);
    this.requests = body.requests;
    this.render();
  }

  noteRequired(request: PendingRequest): boolean {
    return NOTE_REQUIRED_TAGS.has(request.dataset.tag);
  }

  /** Decide a request; returns false (with an inline error) when blocked. */
  async decide(
    requestId: string,
    decision: 'approve' | 'deny',
    note: string,
    ipRanges: string[] = [],
  ): Promise<boolean> {
    const request = this.requests.find((r) => r.id === requestId);
    if (!request || !this.token) return false;

    if (decision === 'approve' && this.noteRequired(request) && note.trim() === '') {
      this.errors.set(
        requestId,
        `A criterion note is required: state that the re-use stays within the ${request.criterion_hint}.`,
      );
      this.render();
      return false;
    }

    try {
      await this.client.decideRequest(this.token, requestId, {
        decision,
        note,
        ip_ranges: ipRanges,
      });
    } catch (error) {
      this.errors.set(requestId, error instanceof ApiError ? error.message : String(error));
      this.render();
      return false;
    }
    this.errors.delete(requestId);
    await this.refresh();
    return true;
  }

  render(): void {
    this.root.innerHTML = '';
    if (this.requests.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'empty-queue';
      empty.textContent = 'No pending access requests.';
      this.root.appendChild(empty);
      return;
    }
    const list = document.createElement('ul');
    list.className = 'approval-queue';
    for (const request of this.requests) {
      list.appendChild(this.renderItem(request));
    }
    this.root.appendChild(list);
  }

  private renderItem(request: PendingRequest): HTMLElement {
    const item = document.createElement('li');
    item.className = `approval-item tag-${request.dataset.tag}`;
    item.dataset.requestId = request.id;

    const title = document.createElement('h3');
    title.className = 'dataset-title';
    const datasetTitle = request.dataset.metadata['title'];
    title.textContent = `${String(datasetTitle ?? request.dataset.id)} [${request.dataset.tag}]`;
    item.appendChild(title);

    const justification = document.createElement('p');
    justification.className = 'justification';
    justification.textContent = `${request.requester}: ${request.justification}`;
    item.appendChild(justification);

    if (this.noteRequired(request) && request.criterion_hint) {
      const hint = document.createElement('p');
      hint.className = 'criterion-hint';
      hint.textContent = `Approval must confirm the consent scope: ${request.criterion_hint}.`;
      item.appendChild(hint);
    }

    const note = document.createElement('textarea');
    note.className = 'criterion-note';
    note.placeholder = this.noteRequired(request)
      ? 'Criterion checked (required)'
      : 'Decision note (optional)';
    item.appendChild(note);

    const ipRanges = document.createElement('input');
    ipRanges.className = 'ip-ranges';
    ipRanges.placeholder = 'Allowed source IPs or CIDR ranges, comma-separated';
    item.appendChild(ipRanges);

    const error = this.errors.get(request.id);
    if (error) {
      const message = document.createElement('p');
      message.className = 'inline-error';
      message.textContent = error;
      item.appendChild(message);
    }

    const controls = document.createElement('div');
    controls.className = 'controls';
    const approve = document.createElement('button');
    approve.className = 'approve';
    approve.textContent = 'Approve';
    approve.addEventListener('click', () =>
      void this.decide(request.id, 'approve', note.value, parseRanges(ipRanges.value)),
    );
    const deny = document.createElement('button');
    deny.className = 'deny';
    deny.textContent = 'Deny';
    deny.addEventListener('click', () => void this.decide(request.id, 'deny', note.value));
    controls.append(approve, deny);
    item.appendChild(controls);
    return item;
  }
}

function parseRanges(raw: string): string[] {
  return raw
    .split(',')
    .map((piece) => piece.trim())
    .filter((piece) => piece.length > 0);
}
