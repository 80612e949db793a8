// JSON document shapes, exactly as the service emits them.

export interface SceneListItem {
  scene_id: string;
  scene_category: string;
  context_tags: string[];
  detections: number;
  has_image: boolean;
}

export interface Detection {
  label: string;
  confidence: number;
  bbox: [number, number, number, number]; // normalized x, y, w, h
}

export interface SceneDetail {
  scene_id: string;
  scene_category: string;
  context_tags: string[];
  detections: Detection[];
  image_uri?: string;
  has_image: boolean;
}

export type SuggestionStatus = 'proposed' | 'accepted' | 'rejected' | 'filtered';

export interface Suggestion {
  object_name: string;
  description: string;
  provenance: 'statistical' | 'semantic';
  rank: number;
  status: SuggestionStatus;
  filter_reason: string | null;
}

export interface Placement {
  asset_id: string;
  x: number;
  z: number;
  rotation_y: number;
  scale_override: number | null;
}

export interface DecisionEvent {
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
  at: string;
}

export type SessionState =
  | 'created'
  | 'anchor_set'
  | 'pair_set'
  | 'candidates_ready'
  | 'completed';

export interface Session {
  session_id: string;
  scene_id: string;
  state: SessionState;
  anchor: string | null;
  co_object: string | null;
  statistical_options: Suggestion[];
  semantic_candidates: Suggestion[];
  placements: Placement[];
  decision_log: DecisionEvent[];
  created_at: string;
  updated_at: string;
}

export type JobStatus = 'queued' | 'running' | 'done' | 'failed';

export interface JobRecord {
  job_id: string;
  session_id: string;
  rank: number;
  object_name: string;
  status: JobStatus;
  asset_id: string | null;
  error: string | null;
}

export interface SessionDoc {
  session: Session;
  jobs: JobRecord[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  locus?: string;
}
