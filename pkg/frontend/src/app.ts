import { ApiClient, ApiError } from './api';
import { CandidateCards } from './cards';
import { browserSaveBlob, downloadExport, type SaveBlob } from './exporter';
import { MutationBusy, MutationGate } from './gate';
import { JobPoller } from './jobs';
import { PlacementEditor } from './placement';
import { createPreview, type PreviewFactory, type PreviewHandle } from './preview';
import { SceneView } from './sceneView';
import { Store } from './store';
import type { Placement, SceneListItem, SessionDoc } from './types';

export interface AppOptions {
  previewFactory?: PreviewFactory;
  save?: SaveBlob;
}

export interface App {
  store: Store;
  gate: MutationGate;
  poller: JobPoller;
  loadScenes(): Promise<SceneListItem[]>;
  openScene(sceneId: string): Promise<void>;
  exportSession(): Promise<Uint8Array | null>;
  dispose(): void;
}

/**
 * Builds the whole console inside `root` and returns handles the entry
 * point (and the tests) drive it through. The server owns all workflow
 * state: every user action here turns into a request, and the UI redraws
 * from whatever session document comes back.
 */
export function createApp(root: HTMLElement, api: ApiClient, options: AppOptions = {}): App {
  const store = new Store();
  const gate = new MutationGate(store);
  const poller = new JobPoller(api, store);
  const previewFactory = options.previewFactory ?? createPreview;
  const save = options.save ?? browserSaveBlob;
  let preview: PreviewHandle | null = null;

  root.classList.add('app');
  const header = document.createElement('header');
  header.className = 'app__header';
  const title = document.createElement('h1');
  title.textContent = 'Urban Tactics Console';
  const scenePicker = document.createElement('select');
  scenePicker.className = 'app__scenes';
  scenePicker.append(new Option('pick a scene…', '', true, true));
  const stateBadge = document.createElement('span');
  stateBadge.className = 'app__state';
  const banner = document.createElement('div');
  banner.className = 'banner';
  banner.style.display = 'none';
  header.append(title, scenePicker, stateBadge);

  const mutate = (label: string, call: () => Promise<SessionDoc>): Promise<SessionDoc | null> =>
    gate.run(label, call).catch((err) => {
      if (err instanceof MutationBusy) {
        return null;
      }
      throw err;
    });

  const sessionId = (): string | null => store.get().doc?.session.session_id ?? null;

  const sceneView = new SceneView(
    store,
    {
      onAnchorPick: (label) => {
        const sid = sessionId();
        if (sid) {
          void mutate('set anchor', () => api.setAnchor(sid, label));
        }
      },
      onChipPick: (objectName) => {
        const sid = sessionId();
        if (!sid) {
          return;
        }
        void (async () => {
          const paired = await mutate('choose pairing', () => api.choosePair(sid, objectName));
          if (paired !== null) {
            await mutate('fetch candidates', () => api.fetchCandidates(sid));
          }
        })();
      },
    },
    (sceneId) => api.sceneImageUrl(sceneId),
  );

  const cards = new CandidateCards({
    onDecide: (rank, decision) => {
      const sid = sessionId();
      if (sid) {
        void mutate(`${decision} #${rank}`, () => api.decide(sid, rank, decision));
      }
    },
    onReprompt: () => {
      const sid = sessionId();
      if (sid) {
        void mutate('re-prompt', () => api.fetchCandidates(sid));
      }
    },
    onPreview: (assetId) => {
      void showPreview(assetId);
    },
  });

  const placement = new PlacementEditor(store, sceneView.stage, {
    onPlace: (body: Placement) => {
      const sid = sessionId();
      if (sid) {
        void mutate('place asset', () => api.placeAsset(sid, body));
      }
    },
  });

  const footer = document.createElement('footer');
  footer.className = 'app__footer';
  const completeButton = document.createElement('button');
  completeButton.type = 'button';
  completeButton.className = 'app__complete';
  completeButton.textContent = 'Complete session';
  completeButton.addEventListener('click', () => {
    const sid = sessionId();
    if (sid) {
      void mutate('complete', () => api.complete(sid));
    }
  });
  const exportButton = document.createElement('button');
  exportButton.type = 'button';
  exportButton.className = 'app__export';
  exportButton.textContent = 'Export session';
  exportButton.addEventListener('click', () => {
    void exportSession();
  });
  footer.append(completeButton, exportButton);

  const main = document.createElement('main');
  main.className = 'app__main';
  main.append(sceneView.root, cards.root, placement.root);
  root.replaceChildren(header, banner, main, footer);

  async function showPreview(assetId: string): Promise<void> {
    try {
      const objText = await api.fetchAssetObj(assetId, 'low');
      if (!preview) {
        preview = previewFactory(placement.previewMount);
      }
      preview.showObj(objText, assetId);
      store.update({ selectedAssetId: assetId });
    } catch (err) {
      if (err instanceof ApiError) {
        store.update({
          banner: { kind: 'error', text: `preview failed: ${err.message}` },
        });
        return;
      }
      throw err;
    }
  }

  async function loadScenes(): Promise<SceneListItem[]> {
    const scenes = await api.listScenes();
    scenePicker.replaceChildren(new Option('pick a scene…', '', true, true));
    for (const scene of scenes) {
      const label = `${scene.scene_id} (${scene.scene_category}, ${scene.detections} objects)`;
      scenePicker.append(new Option(label, scene.scene_id));
    }
    return scenes;
  }

  async function openScene(sceneId: string): Promise<void> {
    const scene = await api.getScene(sceneId);
    store.applyScene(scene);
    await mutate('create session', () => api.createSession(sceneId));
  }

  async function exportSession(): Promise<Uint8Array | null> {
    const sid = sessionId();
    if (!sid) {
      return null;
    }
    try {
      return await downloadExport(api, sid, save);
    } catch (err) {
      if (err instanceof ApiError) {
        store.update({
          banner: { kind: 'error', text: `export failed: ${err.message}` },
        });
        return null;
      }
      throw err;
    }
  }

  scenePicker.addEventListener('change', () => {
    if (scenePicker.value) {
      void openScene(scenePicker.value);
    }
  });

  function renderBanner(state: ReturnType<Store['get']>): void {
    banner.replaceChildren();
    if (!state.banner) {
      banner.style.display = 'none';
      return;
    }
    banner.style.display = '';
    banner.className = `banner banner--${state.banner.kind}`;
    const text = document.createElement('span');
    text.className = 'banner__text';
    text.textContent = state.banner.text;
    banner.appendChild(text);
    const retry = state.banner.retry;
    if (retry) {
      const retryButton = document.createElement('button');
      retryButton.type = 'button';
      retryButton.className = 'banner__retry';
      retryButton.textContent = 'Retry';
      retryButton.addEventListener('click', () => {
        store.update({ banner: null });
        void retry();
      });
      banner.appendChild(retryButton);
    }
    const dismiss = document.createElement('button');
    dismiss.type = 'button';
    dismiss.className = 'banner__dismiss';
    dismiss.textContent = 'Dismiss';
    dismiss.addEventListener('click', () => store.update({ banner: null }));
    banner.appendChild(dismiss);
  }

  const unsubscribe = store.subscribe((state) => {
    stateBadge.textContent = state.doc ? state.doc.session.state : '';
    renderBanner(state);
    sceneView.render(state);
    cards.render(state);
    placement.render(state);
    poller.sync();
  });

  return {
    store,
    gate,
    poller,
    loadScenes,
    openScene,
    exportSession,
    dispose(): void {
      unsubscribe();
      poller.stop();
      preview?.dispose();
    },
  };
}
