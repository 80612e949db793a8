import type { ApiClient } from './api';
import type { Store } from './store';

export const POLL_MS = 1500;

/** Refreshes the session at a fixed interval while any mesh job is pending. */
export class JobPoller {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly store: Store,
  ) {}

  /** Call after every store change; starts or stops the loop as needed. */
  sync(): void {
    const doc = this.store.get().doc;
    const pending = doc?.jobs.some((j) => j.status === 'queued' || j.status === 'running');
    if (pending && this.timer === null) {
      this.timer = setInterval(() => {
        void this.tick();
      }, POLL_MS);
    } else if (!pending && this.timer !== null) {
      this.stop();
    }
  }

  private async tick(): Promise<void> {
    const doc = this.store.get().doc;
    if (!doc) {
      this.stop();
      return;
    }
    try {
      this.store.applyDoc(await this.api.getSession(doc.session.session_id));
    } catch {
      // transient poll failure; the next interval retries
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
