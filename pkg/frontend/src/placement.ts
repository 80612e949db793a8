import { pointToNormalized } from './overlay';
import type { Placement } from './types';
import type { Store, ViewState } from './store';

export interface PlacementActions {
  onPlace(placement: Placement): void;
}

/**
 * Placement controls plus the markers drawn over the stage. Generated
 * assets appear in a pick list; with one selected, clicking (or releasing
 * a drag) on the stage posts a placement at the normalized image-plane
 * point. Moving the rotation slider or scale field while a placed asset
 * is selected re-posts the placement, which the server treats as an
 * upsert keyed by asset id.
 */
export class PlacementEditor {
  readonly root = document.createElement('aside');

  readonly previewMount = document.createElement('div');

  private readonly assetList = document.createElement('div');

  private readonly rotation = document.createElement('input');

  private readonly rotationReadout = document.createElement('span');

  private readonly scale = document.createElement('input');

  private readonly markerLayer = document.createElement('div');

  private lastState: ViewState | null = null;

  constructor(
    private readonly store: Store,
    private readonly stage: HTMLElement,
    private readonly actions: PlacementActions,
  ) {
    this.root.className = 'placement-panel';
    this.assetList.className = 'placement__assets';

    this.rotation.type = 'range';
    this.rotation.min = '0';
    this.rotation.max = '359';
    this.rotation.step = '1';
    this.rotation.value = '0';
    this.rotation.className = 'placement__rotation';
    this.rotation.addEventListener('input', () => this.onRotationChanged());
    this.rotationReadout.className = 'placement__rotation-readout';
    this.rotationReadout.textContent = '0°';

    this.scale.type = 'number';
    this.scale.min = '0';
    this.scale.step = '0.1';
    this.scale.placeholder = 'auto';
    this.scale.className = 'placement__scale';
    this.scale.addEventListener('change', () => this.onScaleChanged());

    const rotationRow = document.createElement('label');
    rotationRow.className = 'placement__row';
    rotationRow.append('rotation ', this.rotation, this.rotationReadout);
    const scaleRow = document.createElement('label');
    scaleRow.className = 'placement__row';
    scaleRow.append('height override (m) ', this.scale);

    const heading = document.createElement('h3');
    heading.textContent = 'Place assets';
    this.previewMount.className = 'placement__preview';
    this.root.append(heading, this.assetList, rotationRow, scaleRow, this.previewMount);

    this.markerLayer.className = 'stage__markers';
    this.stage.appendChild(this.markerLayer);
    this.stage.addEventListener('click', (event) => this.onStageClick(event));
  }

  render(state: ViewState): void {
    this.lastState = state;
    this.renderAssets(state);
    this.renderMarkers(state);
    this.syncControls(state);
  }

  private onStageClick(event: MouseEvent): void {
    const state = this.lastState;
    if (!state || !state.selectedAssetId || state.pendingMutation !== null) {
      return;
    }
    if ((event.target as HTMLElement).closest('.overlay')) {
      return;
    }
    const rect = this.stage.getBoundingClientRect();
    const point = pointToNormalized(event.clientX, event.clientY, rect);
    this.actions.onPlace(this.buildPlacement(state.selectedAssetId, point.x, point.z));
  }

  private onRotationChanged(): void {
    this.rotationReadout.textContent = `${this.rotation.value}°`;
    this.repostSelected();
  }

  private onScaleChanged(): void {
    this.repostSelected();
  }

  private repostSelected(): void {
    const state = this.lastState;
    const placed = state && this.placedFor(state, state.selectedAssetId);
    if (!state || !placed || state.pendingMutation !== null) {
      return;
    }
    this.actions.onPlace(this.buildPlacement(placed.asset_id, placed.x, placed.z));
  }

  private buildPlacement(assetId: string, x: number, z: number): Placement {
    const override = this.scale.value.trim();
    return {
      asset_id: assetId,
      x,
      z,
      rotation_y: Number(this.rotation.value),
      scale_override: override === '' ? null : Number(override),
    };
  }

  private placedFor(state: ViewState, assetId: string | null): Placement | null {
    if (!assetId) {
      return null;
    }
    const placements = state.doc?.session.placements ?? [];
    return placements.find((p) => p.asset_id === assetId) ?? null;
  }

  private renderAssets(state: ViewState): void {
    this.assetList.replaceChildren();
    const doc = state.doc;
    if (!doc || doc.jobs.length === 0) {
      const hint = document.createElement('p');
      hint.className = 'placement__hint';
      hint.textContent = 'Accepted candidates show up here once their meshes land.';
      this.assetList.appendChild(hint);
      return;
    }
    const names = new Map<number, string>();
    for (const candidate of doc.session.semantic_candidates) {
      names.set(candidate.rank, candidate.object_name);
    }
    for (const job of doc.jobs) {
      const row = document.createElement('button');
      row.type = 'button';
      row.className = 'placement__asset';
      const label = names.get(job.rank) ?? job.object_name;
      if (job.status === 'done' && job.asset_id) {
        const assetId = job.asset_id;
        row.textContent = label;
        row.dataset.assetId = assetId;
        if (state.selectedAssetId === assetId) {
          row.classList.add('placement__asset--selected');
        }
        if (this.placedFor(state, assetId)) {
          row.classList.add('placement__asset--placed');
        }
        row.addEventListener('click', () => this.store.update({ selectedAssetId: assetId }));
      } else {
        row.textContent = `${label} (${job.status})`;
        row.disabled = true;
      }
      this.assetList.appendChild(row);
    }
  }

  private renderMarkers(state: ViewState): void {
    this.markerLayer.replaceChildren();
    const placements = state.doc?.session.placements ?? [];
    const rect = this.stage.getBoundingClientRect();
    for (const placement of placements) {
      const marker = document.createElement('button');
      marker.type = 'button';
      marker.className = 'marker';
      marker.dataset.assetId = placement.asset_id;
      marker.style.left = `${placement.x * rect.width}px`;
      marker.style.top = `${placement.z * rect.height}px`;
      marker.style.transform = `translate(-50%, -50%) rotate(${placement.rotation_y}deg)`;
      marker.textContent = '▲';
      if (state.selectedAssetId === placement.asset_id) {
        marker.classList.add('marker--selected');
      }
      marker.addEventListener('click', (event) => {
        event.stopPropagation();
        this.store.update({ selectedAssetId: placement.asset_id });
      });
      this.markerLayer.appendChild(marker);
    }
  }

  private syncControls(state: ViewState): void {
    const placed = this.placedFor(state, state.selectedAssetId);
    if (placed && document.activeElement !== this.rotation) {
      this.rotation.value = String(Math.round(placed.rotation_y));
      this.rotationReadout.textContent = `${this.rotation.value}°`;
    }
    if (placed && document.activeElement !== this.scale) {
      this.scale.value = placed.scale_override === null ? '' : String(placed.scale_override);
    }
  }
}
