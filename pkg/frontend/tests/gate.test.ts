import { describe, expect, it } from 'vitest';

import { ApiError } from '../src/api';
import { MutationBusy, MutationGate } from '../src/gate';
import { Store } from '../src/store';
import type { SessionDoc } from '../src/types';

const DOC: SessionDoc = {
  session: {
    session_id: 's-0001',
    scene_id: 'plaza-001',
    state: 'created',
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

describe('MutationGate', () => {
  it('rejects a second mutation while the first is in flight', async () => {
    const store = new Store();
    const gate = new MutationGate(store);
    let release: (doc: SessionDoc) => void = () => undefined;
    const first = gate.run('first', () => new Promise((resolve) => (release = resolve)));
    expect(store.get().pendingMutation).toBe('first');
    await expect(gate.run('second', () => Promise.resolve(DOC))).rejects.toBeInstanceOf(
      MutationBusy,
    );
    release(DOC);
    await first;
    expect(store.get().pendingMutation).toBeNull();
    expect(store.get().doc).toEqual(DOC);
  });

  it('turns an API error into a banner with a retry hook', async () => {
    const store = new Store();
    const gate = new MutationGate(store);
    let calls = 0;
    const result = await gate.run('set anchor', () => {
      calls += 1;
      if (calls === 1) {
        return Promise.reject(new ApiError(409, 'invalid_state', 'anchor can only be set once'));
      }
      return Promise.resolve(DOC);
    });
    expect(result).toBeNull();
    const banner = store.get().banner;
    expect(banner?.kind).toBe('error');
    expect(banner?.text).toBe('set anchor failed: anchor can only be set once');
    banner?.retry?.();
    await Promise.resolve();
    expect(calls).toBe(2);
  });

  it('rethrows non-API errors', async () => {
    const gate = new MutationGate(new Store());
    await expect(gate.run('boom', () => Promise.reject(new Error('network down')))).rejects.toThrow(
      'network down',
    );
  });
});
