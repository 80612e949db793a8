import type { JobRecord, Suggestion } from './types';
import type { ViewState } from './store';

export interface CardActions {
  onDecide(rank: number, decision: 'accept' | 'reject'): void;
  onReprompt(): void;
  onPreview(assetId: string): void;
}

/**
 * One card per semantic candidate, ordered by rank. Proposed cards carry
 * accept/reject buttons; accepted cards show the mesh job's progress and,
 * once the job lands, a preview button; filtered cards explain why they
 * were pulled. All controls freeze while a mutation is in flight.
 */
export class CandidateCards {
  readonly root = document.createElement('section');

  private readonly list = document.createElement('div');

  private readonly toolbar = document.createElement('div');

  private readonly repromptButton = document.createElement('button');

  constructor(private readonly actions: CardActions) {
    this.root.className = 'cards-panel';
    this.list.className = 'cards';
    this.toolbar.className = 'cards__toolbar';
    this.repromptButton.type = 'button';
    this.repromptButton.className = 'cards__reprompt';
    this.repromptButton.textContent = 'Re-prompt remaining';
    this.repromptButton.addEventListener('click', () => this.actions.onReprompt());
    this.toolbar.appendChild(this.repromptButton);
    this.root.append(this.toolbar, this.list);
  }

  render(state: ViewState): void {
    const session = state.doc?.session ?? null;
    const jobs = state.doc?.jobs ?? [];
    const busy = state.pendingMutation !== null;
    this.list.replaceChildren();
    const candidates = session ? [...session.semantic_candidates] : [];
    candidates.sort((a, b) => a.rank - b.rank);
    const showToolbar = candidates.length > 0;
    this.toolbar.style.display = showToolbar ? '' : 'none';
    this.repromptButton.disabled = busy;
    if (candidates.length === 0) {
      const hint = document.createElement('p');
      hint.className = 'cards__hint';
      hint.textContent =
        session === null
          ? 'No session yet.'
          : 'Pick an anchor and a pairing to fetch candidates.';
      this.list.appendChild(hint);
      return;
    }
    for (const candidate of candidates) {
      this.list.appendChild(this.cardFor(candidate, jobs, busy));
    }
  }

  private cardFor(candidate: Suggestion, jobs: JobRecord[], busy: boolean): HTMLElement {
    const card = document.createElement('article');
    card.className = `card card--${candidate.status}`;
    card.dataset.rank = String(candidate.rank);

    const title = document.createElement('h3');
    title.className = 'card__title';
    title.textContent = candidate.object_name;

    const blurb = document.createElement('p');
    blurb.className = 'card__description';
    blurb.textContent = candidate.description;

    const status = document.createElement('span');
    status.className = 'card__status';
    status.textContent = candidate.status;

    card.append(title, status, blurb);

    if (candidate.status === 'filtered') {
      const reason = document.createElement('p');
      reason.className = 'card__filter-reason';
      reason.textContent = candidate.filter_reason ?? 'filtered';
      card.appendChild(reason);
      return card;
    }

    if (candidate.status === 'proposed') {
      card.appendChild(this.decisionRow(candidate.rank, busy));
      return card;
    }

    if (candidate.status === 'accepted') {
      card.appendChild(this.jobBadge(candidate.rank, jobs, busy));
    }
    return card;
  }

  private decisionRow(rank: number, busy: boolean): HTMLElement {
    const row = document.createElement('div');
    row.className = 'card__actions';
    const accept = document.createElement('button');
    accept.type = 'button';
    accept.className = 'card__accept';
    accept.textContent = 'Accept';
    accept.disabled = busy;
    accept.addEventListener('click', () => this.actions.onDecide(rank, 'accept'));
    const reject = document.createElement('button');
    reject.type = 'button';
    reject.className = 'card__reject';
    reject.textContent = 'Reject';
    reject.disabled = busy;
    reject.addEventListener('click', () => this.actions.onDecide(rank, 'reject'));
    row.append(accept, reject);
    return row;
  }

  private jobBadge(rank: number, jobs: JobRecord[], busy: boolean): HTMLElement {
    const badge = document.createElement('div');
    badge.className = 'card__job';
    const job = jobs.find((j) => j.rank === rank);
    if (!job) {
      badge.textContent = 'queued for generation';
      return badge;
    }
    badge.dataset.jobStatus = job.status;
    if (job.status === 'queued' || job.status === 'running') {
      badge.textContent = `generating mesh (${job.status})…`;
      badge.classList.add('card__job--pending');
    } else if (job.status === 'failed') {
      badge.textContent = `generation failed: ${job.error ?? 'unknown error'}`;
      badge.classList.add('card__job--failed');
    } else if (job.asset_id) {
      const assetId = job.asset_id;
      const preview = document.createElement('button');
      preview.type = 'button';
      preview.className = 'card__preview';
      preview.textContent = 'Preview 3D';
      preview.disabled = busy;
      preview.addEventListener('click', () => this.actions.onPreview(assetId));
      badge.appendChild(preview);
    }
    return badge;
  }
}
