import { overlayBox } from './overlay';
import type { Store, ViewState } from './store';

export interface SceneViewActions {
  onAnchorPick(label: string): void;
  onChipPick(objectName: string): void;
}

/**
 * The scene stage: image (or placeholder), one labeled overlay per
 * detection, and the statistical chips once an anchor is set. Clicking an
 * overlay proposes that label as the anchor; the server decides whether
 * that is currently legal.
 */
export class SceneView {
  readonly root = document.createElement('section');

  readonly stage = document.createElement('div');

  private readonly chips = document.createElement('div');

  private readonly overlayLayer = document.createElement('div');

  private readonly image = document.createElement('img');

  private readonly placeholder = document.createElement('div');

  constructor(
    private readonly store: Store,
    private readonly actions: SceneViewActions,
    private readonly imageUrlFor: (sceneId: string) => string,
  ) {
    this.root.className = 'scene-panel';
    this.stage.className = 'stage';
    this.image.className = 'stage__image';
    this.image.alt = 'scene';
    this.placeholder.className = 'stage__placeholder';
    this.overlayLayer.className = 'stage__overlays';
    this.chips.className = 'chips';
    this.stage.append(this.image, this.placeholder, this.overlayLayer);
    this.root.append(this.stage, this.chips);
  }

  render(state: ViewState): void {
    const scene = state.scene;
    this.renderBackdrop(state);
    this.overlayLayer.replaceChildren();
    if (scene) {
      const rect = this.stage.getBoundingClientRect();
      for (const detection of scene.detections) {
        this.overlayLayer.appendChild(this.overlayFor(detection.label, detection.bbox, rect));
      }
    }
    this.renderChips(state);
    this.stage.classList.toggle('stage--busy', state.pendingMutation !== null);
  }

  private renderBackdrop(state: ViewState): void {
    const scene = state.scene;
    if (scene?.has_image) {
      this.image.src = this.imageUrlFor(scene.scene_id);
      this.image.style.display = '';
      this.placeholder.style.display = 'none';
    } else {
      this.image.removeAttribute('src');
      this.image.style.display = 'none';
      this.placeholder.style.display = '';
      this.placeholder.textContent = scene
        ? `${scene.scene_id} (${scene.scene_category}, no image)`
        : 'pick a scene';
    }
  }

  private overlayFor(
    label: string,
    bbox: [number, number, number, number],
    rect: { width: number; height: number },
  ): HTMLElement {
    const box = overlayBox(bbox, rect.width, rect.height);
    const el = document.createElement('button');
    el.type = 'button';
    el.className = 'overlay';
    el.dataset.label = label;
    el.style.left = `${box.left}px`;
    el.style.top = `${box.top}px`;
    el.style.width = `${box.width}px`;
    el.style.height = `${box.height}px`;
    const tag = document.createElement('span');
    tag.className = 'overlay__label';
    tag.textContent = label;
    el.appendChild(tag);
    el.addEventListener('click', () => this.actions.onAnchorPick(label));
    el.addEventListener('mouseenter', () => this.store.update({ hoverTarget: label }));
    el.addEventListener('mouseleave', () => this.store.update({ hoverTarget: null }));
    return el;
  }

  private renderChips(state: ViewState): void {
    this.chips.replaceChildren();
    const session = state.doc?.session;
    if (!session || session.statistical_options.length === 0) {
      return;
    }
    const heading = document.createElement('span');
    heading.className = 'chips__heading';
    heading.textContent = `often seen with ${session.anchor}:`;
    this.chips.appendChild(heading);
    for (const option of session.statistical_options) {
      const chip = document.createElement('button');
      chip.type = 'button';
      chip.className = 'chip';
      chip.dataset.object = option.object_name;
      chip.textContent = `${option.rank}. ${option.object_name}`;
      chip.disabled = state.pendingMutation !== null;
      if (session.co_object === option.object_name) {
        chip.classList.add('chip--chosen');
      }
      chip.addEventListener('click', () => this.actions.onChipPick(option.object_name));
      this.chips.appendChild(chip);
    }
  }
}
