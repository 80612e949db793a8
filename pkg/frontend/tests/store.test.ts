import { describe, expect, it } from 'vitest';

import { Store } from '../src/store';
import type { SessionDoc } from '../src/types';

function docWithState(state: 'created' | 'anchor_set'): SessionDoc {
  return {
    session: {
      session_id: 's-0001',
      scene_id: 'plaza-001',
      state,
      anchor: null,
      co_object: null,
      statistical_options: [],
      semantic_candidates: [],
      placements: [],
      decision_log: [],
      created_at: 't0',
      updated_at: 't0',
    },
    jobs: [],
  };
}

describe('Store', () => {
  it('replaces the session document wholesale with what the server sent', () => {
    const store = new Store();
    store.applyDoc(docWithState('anchor_set'));
    store.applyDoc(docWithState('created'));
    expect(store.get().doc?.session.state).toBe('created');
  });

  it('clears any banner when a fresh document lands', () => {
    const store = new Store();
    store.update({ banner: { kind: 'error', text: 'boom' } });
    store.applyDoc(docWithState('created'));
    expect(store.get().banner).toBeNull();
  });

  it('notifies subscribers and honors unsubscribe', () => {
    const store = new Store();
    const seen: string[] = [];
    const off = store.subscribe((state) => {
      seen.push(state.pendingMutation ?? '-');
    });
    store.update({ pendingMutation: 'set anchor' });
    off();
    store.update({ pendingMutation: null });
    expect(seen).toEqual(['set anchor']);
  });
});
