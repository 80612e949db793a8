import { ApiError } from './api';
import type { Store } from './store';
import type { SessionDoc } from './types';

// At most one mutating request may be in flight. Reads (session polling,
// asset fetches) bypass the gate.

export class MutationBusy extends Error {
  constructor() {
    super('a mutating request is already in flight');
    this.name = 'MutationBusy';
  }
}

export class MutationGate {
  private inFlight = false;

  constructor(private readonly store: Store) {}

  get busy(): boolean {
    return this.inFlight;
  }

  /**
   * Run one mutation: marks the store pending, applies the resulting
   * session document, and surfaces API errors as a banner with a retry
   * hook. Rejects immediately when another mutation is still running.
   */
  async run(label: string, call: () => Promise<SessionDoc>): Promise<SessionDoc | null> {
    if (this.inFlight) {
      throw new MutationBusy();
    }
    this.inFlight = true;
    this.store.update({ pendingMutation: label, banner: null });
    try {
      const doc = await call();
      this.store.applyDoc(doc);
      return doc;
    } catch (error) {
      if (error instanceof ApiError) {
        this.store.update({
          banner: {
            kind: 'error',
            text: `${label} failed: ${error.message}`,
            retry: () => {
              void this.run(label, call).catch(() => undefined);
            },
          },
        });
        return null;
      }
      throw error;
    } finally {
      this.inFlight = false;
      this.store.update({ pendingMutation: null });
    }
  }
}
