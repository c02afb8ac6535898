import { FetchLike } from "../src/api.js";
import { Classification, GRID_CELLS } from "../src/types.js";

/** In-memory stand-in for the classification service, mirroring its
 * semantics: per-session trajectories, run-length border filtering with
 * theta = 3, and consecutive-duplicate compression. The cluster function is
 * an arbitrary but deterministic map from the wire grid. */
export class FakeService {
  sessions = new Map<string, number[]>();
  postedGrids: string[] = [];
  failing = false;
  private counter = 0;

  clusterOf(wire: string): number {
    let walls = 0;
    let content = 0;
    for (const ch of wire) {
      if (ch === "W") walls += 1;
      if (ch === "E" || ch === "T" || ch === "B") content += 1;
    }
    return (walls + 5 * content) % 12;
  }

  createSession(): string {
    this.counter += 1;
    const id = `fake-${this.counter}`;
    this.sessions.set(id, []);
    return id;
  }

  classify(sessionId: string, wire: string): Classification {
    const ids = this.sessions.get(sessionId);
    if (!ids) throw new Error(`unknown session ${sessionId}`);
    if (wire.length !== GRID_CELLS) throw new Error("bad grid length");
    this.postedGrids.push(wire);
    ids.push(this.clusterOf(wire));
    return {
      session_id: sessionId,
      step_index: ids.length - 1,
      cluster: ids[ids.length - 1],
      path: compress(filterBorder(ids, 3)),
      matched_archetypes: [],
      predicted_next: [],
    };
  }

  /** FetchLike transport over this fake, for injecting into ServiceClient. */
  fetch: FetchLike = async (input, init) => {
    if (this.failing) {
      throw new Error("network down");
    }
    const url = new URL(input, "http://fake");
    const respond = (body: unknown, status = 200) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
      });
    if (url.pathname === "/sessions" && init?.method === "POST") {
      return respond({ session_id: this.createSession() });
    }
    const stepMatch = url.pathname.match(/^\/sessions\/([^/]+)\/steps$/);
    if (stepMatch && init?.method === "POST") {
      const { grid } = JSON.parse(String(init.body)) as { grid: string };
      try {
        return respond(this.classify(stepMatch[1], grid));
      } catch (e) {
        return respond({ error: String(e) }, 400);
      }
    }
    if (url.pathname === "/model") {
      return respond({
        algorithm: "kmeans", encoder: "tiles", n_clusters: 12,
        n_rows: 0, clusters: [], personas: [],
      });
    }
    return respond({ error: "not found" }, 404);
  };
}

export function filterBorder(ids: number[], theta: number): number[] {
  const runs: Array<[number, number]> = [];
  for (const id of ids) {
    const last = runs[runs.length - 1];
    if (last && last[0] === id) last[1] += 1;
    else runs.push([id, 1]);
  }
  let kept = runs.filter(([, len]) => len >= theta);
  if (kept.length === 0) {
    let longest = runs[0];
    for (const run of runs) if (run[1] > longest[1]) longest = run;
    kept = [longest];
  }
  const out: number[] = [];
  for (const [id, len] of kept) for (let i = 0; i < len; i++) out.push(id);
  return out;
}

export function compress(ids: number[]): number[] {
  const out: number[] = [];
  for (const id of ids) if (out.length === 0 || out[out.length - 1] !== id) out.push(id);
  return out;
}
