/** Wire types for the session service. */

export const CRITERIA = [
  "ST", "IL", "NP", "CN", "CAM", "AR", "ANR", "VR", "GA",
] as const;

export type CriterionId = (typeof CRITERIA)[number];

export type Weights = Partial<Record<CriterionId, number>>;

export type Point = readonly [number, number];

/** Graph object as served inside the session description. */
export interface GraphObj {
  nodes: string[];
  edges: [string, string][];
}

/** One undirected edge as a pair of node indices into `positions`. */
export type EdgeIndex = readonly [number, number];

export interface Snapshot {
  type: "snapshot";
  iteration: number;
  positions: Point[];
  losses: Partial<Record<CriterionId, number>>;
  total: number;
  qualities: Partial<Record<CriterionId, number>> | null;
}

export interface Heartbeat {
  type: "heartbeat";
  status: string;
  iteration: number;
}

export interface EndEvent {
  type: "end";
  status: string;
  iteration: number;
  error: string | null;
}

export type StreamEvent = Snapshot | Heartbeat | EndEvent;

export interface SessionDescription {
  id: string;
  status: string;
  iteration: number;
  n: number;
  edges: number;
  graph: GraphObj;
  positions: Point[];
  weights: Weights;
  losses: Partial<Record<CriterionId, number>>;
  cadence: number;
  converged_at: number | null;
  error: string | null;
}

export interface CreateSessionBody {
  family?: { family: string; [param: string]: string | number };
  graph?: GraphObj;
  weights?: Weights;
  config?: {
    lr?: number;
    iters?: number;
    mode?: "full" | "stochastic";
    batch?: number;
    seed?: number;
    lr_decay?: number;
    snapshot_every?: number;
  };
  layout?: Point[];
  cadence?: number;
  include_qualities?: boolean;
}

export interface WeightsAck {
  ok: boolean;
  applies_at_iteration: number;
}

export interface DragAck {
  ok: boolean;
  iteration: number;
}

/** Map the graph's id-pair edges to index pairs into the positions array. */
export function edgeIndices(graph: GraphObj): EdgeIndex[] {
  const index = new Map<string, number>();
  graph.nodes.forEach((id, i) => index.set(id, i));
  return graph.edges.map(([a, b]) => {
    const ia = index.get(a);
    const ib = index.get(b);
    if (ia === undefined || ib === undefined) {
      throw new Error(`edge [${a}, ${b}] references an unknown node id`);
    }
    return [ia, ib] as const;
  });
}
