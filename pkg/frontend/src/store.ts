import type { SceneDetail, SessionDoc } from './types';

// ViewState mirrors the latest server documents plus purely local
// interaction state. The server is authoritative: nothing here advances
// the workflow; documents are only ever replaced wholesale by responses.

export interface Banner {
  kind: 'error' | 'info';
  text: string;
  retry?: () => void;
}

export interface ViewState {
  scene: SceneDetail | null;
  doc: SessionDoc | null;
  hoverTarget: string | null;
  selectedAssetId: string | null;
  pendingMutation: string | null; // label of the one in-flight mutation
  banner: Banner | null;
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = {
    scene: null,
    doc: null,
    hoverTarget: null,
    selectedAssetId: null,
    pendingMutation: null,
    banner: null,
  };

  private listeners = new Set<Listener>();

  get(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Replace the session document with what the server said, verbatim. */
  applyDoc(doc: SessionDoc): void {
    this.update({ doc, banner: null });
  }

  applyScene(scene: SceneDetail): void {
    this.update({ scene });
  }
}
