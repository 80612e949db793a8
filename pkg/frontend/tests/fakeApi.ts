import type { FetchLike } from '../src/api';
import type {
  JobRecord,
  Placement,
  SceneDetail,
  Session,
  SessionDoc,
  Suggestion,
} from '../src/types';

// In-memory stand-in for the session service. It enforces the same
// workflow rules and speaks the same document shapes, so component tests
// exercise the client exactly as the real server would.

export const SCENE: SceneDetail = {
  scene_id: 'plaza-001',
  scene_category: 'plaza',
  context_tags: ['open', 'paved'],
  detections: [
    { label: 'bench', confidence: 0.93, bbox: [0.1, 0.55, 0.25, 0.2] },
    { label: 'tree', confidence: 0.88, bbox: [0.45, 0.1, 0.3, 0.55] },
    { label: 'sign', confidence: 0.74, bbox: [0.8, 0.3, 0.1, 0.3] },
  ],
  has_image: false,
};

export const STAT_OPTIONS = ['window', 'tree', 'sign', 'traffic light', 'crosswalk'];

export const FIRST_LISTINGS: Array<[string, string]> = [
  ['Outdoor Chess Table', 'A weatherproof table with an inlaid chess board.'],
  ['Drinking Fountain', 'A push-button fountain with a bottle filler.'],
  ['Bike Rack', 'A u-shaped rack with room for six bikes.'],
  ['Public Art Sculpture', 'An abstract piece in powder-coated steel.'],
  ['Planter with Seasonal Flowers', 'A concrete planter with rotating plantings.'],
];

export const SECOND_LISTINGS: Array<[string, string]> = [
  ['Shade Sail', 'A triangular fabric canopy over the seating area.'],
  ['Little Free Library', 'A weatherproof cabinet for book exchange.'],
  ['Ping Pong Table', 'A concrete table tennis table.'],
  ['Wayfinding Kiosk', 'A map pillar for pedestrians.'],
  ['Bench Swing', 'A sheltered swing bench for two.'],
];

export const CUBE_OBJ = [
  'v -0.4 0.0 -0.4',
  'v 0.4 0.0 -0.4',
  'v 0.4 0.8 -0.4',
  'v -0.4 0.8 -0.4',
  'v -0.4 0.0 0.4',
  'v 0.4 0.0 0.4',
  'v 0.4 0.8 0.4',
  'v -0.4 0.8 0.4',
  'f 1 2 3',
  'f 1 3 4',
  'f 5 7 6',
  'f 5 8 7',
  'f 1 4 8',
  'f 1 8 5',
  'f 2 6 7',
  'f 2 7 3',
  'f 4 3 7',
  'f 4 7 8',
  'f 1 5 6',
  'f 1 6 2',
  '',
].join('\n');

interface FakeOptions {
  /** Mark this rank of the first batch as filtered with this reason. */
  filtered?: { rank: number; reason: string };
  /** GET /sessions polls needed to move a job queued -> done (default 2). */
  pollsPerJob?: number;
}

interface FakeJob extends JobRecord {
  polls: number;
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

function errorResponse(status: number, code: string, message: string): Response {
  return jsonResponse({ code, message }, status);
}

export class FakeService {
  readonly requests: Array<{ method: string; path: string; body: unknown }> = [];

  private session: Session | null = null;

  private jobs: FakeJob[] = [];

  private jobCounter = 0;

  private batch = 0;

  constructor(private readonly options: FakeOptions = {}) {}

  readonly fetch: FetchLike = async (input, init) => {
    const path = input.replace(/^https?:\/\/[^/]+/, '');
    const method = (init?.method ?? 'GET').toUpperCase();
    const body = init?.body ? (JSON.parse(init.body as string) as unknown) : null;
    this.requests.push({ method, path, body });
    return this.route(method, path, body);
  };

  get doc(): SessionDoc {
    if (!this.session) {
      throw new Error('no session yet');
    }
    return {
      session: structuredClone(this.session),
      jobs: this.jobs.map(({ polls, ...job }) => {
        void polls;
        return structuredClone(job);
      }),
    };
  }

  private route(method: string, path: string, body: unknown): Response {
    if (method === 'GET' && path === '/scenes') {
      return jsonResponse([
        {
          scene_id: SCENE.scene_id,
          scene_category: SCENE.scene_category,
          context_tags: SCENE.context_tags,
          detections: SCENE.detections.length,
          has_image: SCENE.has_image,
        },
      ]);
    }
    const sceneMatch = path.match(/^\/scenes\/([^/]+)$/);
    if (method === 'GET' && sceneMatch) {
      if (sceneMatch[1] !== SCENE.scene_id) {
        return errorResponse(404, 'unknown_scene', `no scene ${sceneMatch[1]}`);
      }
      return jsonResponse(SCENE);
    }
    if (method === 'POST' && path === '/sessions') {
      return this.createSession(body as { scene_id?: string });
    }
    const assetMatch = path.match(/^\/assets\/([^/]+)\/(full|low)\.obj$/);
    if (method === 'GET' && assetMatch) {
      return this.assetObj(assetMatch[1] ?? '');
    }
    const sessionMatch = path.match(/^\/sessions\/([^/]+)(?:\/([a-z]+))?$/);
    if (sessionMatch) {
      return this.sessionRoute(method, sessionMatch[1] ?? '', sessionMatch[2] ?? null, body);
    }
    return errorResponse(404, 'not_found', `no route ${method} ${path}`);
  }

  private createSession(body: { scene_id?: string }): Response {
    if (!body.scene_id || body.scene_id !== SCENE.scene_id) {
      return errorResponse(404, 'unknown_scene', `no scene ${body.scene_id ?? ''}`);
    }
    this.session = {
      session_id: 's-0001',
      scene_id: SCENE.scene_id,
      state: 'created',
      anchor: null,
      co_object: null,
      statistical_options: [],
      semantic_candidates: [],
      placements: [],
      decision_log: [],
      created_at: '2000-01-01T00:00:00Z',
      updated_at: '2000-01-01T00:00:00Z',
    };
    this.jobs = [];
    this.batch = 0;
    this.log('create');
    return jsonResponse(this.doc, 201);
  }

  private sessionRoute(method: string, sid: string, verb: string | null, body: unknown): Response {
    const session = this.session;
    if (!session || session.session_id !== sid) {
      return errorResponse(404, 'unknown_session', `no session ${sid}`);
    }
    if (method === 'GET' && verb === null) {
      this.advanceJobs();
      return jsonResponse(this.doc);
    }
    if (method === 'GET' && verb === 'export') {
      return new Response(JSON.stringify({ session, jobs: this.doc.jobs }, null, 1), {
        status: 200,
        headers: { 'content-type': 'application/json' },
      });
    }
    if (method !== 'POST') {
      return errorResponse(404, 'not_found', `no route ${method} ${verb ?? ''}`);
    }
    switch (verb) {
      case 'anchor':
        return this.setAnchor(session, body as { anchor?: string });
      case 'pair':
        return this.choosePair(session, body as { co_object?: string; override?: boolean });
      case 'candidates':
        return this.fetchCandidates(session);
      case 'decisions':
        return this.decide(session, body as { rank?: number; decision?: string });
      case 'placements':
        return this.place(session, body as Placement);
      case 'complete':
        return this.complete(session);
      default:
        return errorResponse(404, 'not_found', `no verb ${verb ?? ''}`);
    }
  }

  private setAnchor(session: Session, body: { anchor?: string }): Response {
    if (session.state !== 'created') {
      return errorResponse(409, 'invalid_state', `anchor can only be set once (state ${session.state})`);
    }
    const anchor = body.anchor ?? '';
    if (!SCENE.detections.some((d) => d.label === anchor)) {
      return errorResponse(422, 'anchor_not_in_scene', `${anchor} was not detected in this scene`);
    }
    session.state = 'anchor_set';
    session.anchor = anchor;
    session.statistical_options = STAT_OPTIONS.map((name, i) => ({
      object_name: name,
      description: '',
      provenance: 'statistical',
      rank: i + 1,
      status: 'proposed',
      filter_reason: null,
    }));
    this.log('anchor');
    return jsonResponse(this.doc);
  }

  private choosePair(session: Session, body: { co_object?: string; override?: boolean }): Response {
    if (session.state !== 'anchor_set') {
      return errorResponse(409, 'invalid_state', `pairing needs an anchor first (state ${session.state})`);
    }
    const name = body.co_object ?? '';
    const offered = session.statistical_options.some((o) => o.object_name === name);
    if (!offered && !body.override) {
      return errorResponse(422, 'not_an_option', `${name} is not among the offered pairings`);
    }
    session.state = 'pair_set';
    session.co_object = name;
    this.log('pair');
    return jsonResponse(this.doc);
  }

  private fetchCandidates(session: Session): Response {
    if (session.state !== 'pair_set' && session.state !== 'candidates_ready') {
      return errorResponse(409, 'invalid_state', `candidates need a pairing first (state ${session.state})`);
    }
    const listings = this.batch === 0 ? FIRST_LISTINGS : SECOND_LISTINGS;
    const decided = new Map<number, Suggestion>();
    for (const candidate of session.semantic_candidates) {
      if (candidate.status === 'accepted' || candidate.status === 'rejected') {
        decided.set(candidate.rank, candidate);
      }
    }
    const fresh: Suggestion[] = [];
    let next = 0;
    for (let rank = 1; rank <= 5; rank += 1) {
      const kept = decided.get(rank);
      if (kept) {
        fresh.push(kept);
        continue;
      }
      const listing = listings[next % listings.length];
      next += 1;
      if (!listing) {
        break;
      }
      const suggestion: Suggestion = {
        object_name: listing[0],
        description: listing[1],
        provenance: 'semantic',
        rank,
        status: 'proposed',
        filter_reason: null,
      };
      const filtered = this.options.filtered;
      if (this.batch === 0 && filtered && filtered.rank === rank) {
        suggestion.status = 'filtered';
        suggestion.filter_reason = filtered.reason;
      }
      fresh.push(suggestion);
    }
    session.semantic_candidates = fresh;
    session.state = 'candidates_ready';
    this.batch += 1;
    this.log('candidates');
    return jsonResponse(this.doc);
  }

  private decide(session: Session, body: { rank?: number; decision?: string }): Response {
    if (session.state !== 'candidates_ready') {
      return errorResponse(409, 'invalid_state', `no candidates to decide on (state ${session.state})`);
    }
    const candidate = session.semantic_candidates.find((c) => c.rank === body.rank);
    if (!candidate) {
      return errorResponse(404, 'unknown_candidate', `no candidate at rank ${body.rank ?? '?'}`);
    }
    if (candidate.status !== 'proposed') {
      return errorResponse(409, 'already_decided', `rank ${candidate.rank} is ${candidate.status}`);
    }
    if (body.decision !== 'accept' && body.decision !== 'reject') {
      return errorResponse(400, 'schema_error', `decision must be accept or reject`);
    }
    candidate.status = body.decision === 'accept' ? 'accepted' : 'rejected';
    if (body.decision === 'accept') {
      this.jobCounter += 1;
      this.jobs.push({
        job_id: `s-0001-e${this.jobCounter}`,
        session_id: session.session_id,
        rank: candidate.rank,
        object_name: candidate.object_name,
        status: 'queued',
        asset_id: null,
        error: null,
        polls: 0,
      });
    }
    this.log('decide');
    return jsonResponse(this.doc);
  }

  private place(session: Session, body: Placement): Response {
    if (session.state !== 'candidates_ready') {
      return errorResponse(409, 'invalid_state', `placements need candidates (state ${session.state})`);
    }
    const job = this.jobs.find((j) => j.asset_id === body.asset_id);
    if (!job || job.status !== 'done') {
      return errorResponse(409, 'asset_not_ready', `asset ${body.asset_id} has no finished mesh`);
    }
    if (body.x < 0 || body.x > 1 || body.z < 0 || body.z > 1) {
      return errorResponse(400, 'schema_error', 'x and z must lie in [0, 1]');
    }
    const placement: Placement = {
      asset_id: body.asset_id,
      x: body.x,
      z: body.z,
      rotation_y: body.rotation_y ?? 0,
      scale_override: body.scale_override ?? null,
    };
    const existing = session.placements.findIndex((p) => p.asset_id === body.asset_id);
    if (existing >= 0) {
      session.placements[existing] = placement;
    } else {
      session.placements.push(placement);
    }
    this.log('place');
    return jsonResponse(this.doc);
  }

  private complete(session: Session): Response {
    if (session.state !== 'candidates_ready') {
      return errorResponse(409, 'invalid_state', `nothing to complete (state ${session.state})`);
    }
    session.state = 'completed';
    this.log('complete');
    return jsonResponse(this.doc);
  }

  private assetObj(assetId: string): Response {
    const job = this.jobs.find((j) => j.asset_id === assetId);
    if (!job) {
      return errorResponse(404, 'unknown_asset', `no asset ${assetId}`);
    }
    return new Response(CUBE_OBJ, {
      status: 200,
      headers: { 'content-type': 'text/plain' },
    });
  }

  private advanceJobs(): void {
    const pollsPerJob = this.options.pollsPerJob ?? 2;
    for (const job of this.jobs) {
      if (job.status === 'done' || job.status === 'failed') {
        continue;
      }
      job.polls += 1;
      if (job.polls >= pollsPerJob) {
        job.status = 'done';
        job.asset_id = job.job_id;
      } else {
        job.status = 'running';
      }
    }
  }

  private log(kind: string): void {
    this.session?.decision_log.push({
      seq: this.session.decision_log.length,
      kind,
      at: '2000-01-01T00:00:00Z',
      payload: {},
    });
  }
}
