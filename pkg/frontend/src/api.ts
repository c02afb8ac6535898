import { Classification, ModelCard } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin client for the classification service; fetch is injectable so tests
 * and offline simulations can stub the transport. */
export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async createSession(): Promise<string> {
    const res = await this.fetchImpl(`${this.baseUrl}/sessions`, { method: "POST" });
    if (!res.ok) throw new Error(`create session failed: ${res.status}`);
    const body = (await res.json()) as { session_id: string };
    return body.session_id;
  }

  async postStep(sessionId: string, wireGrid: string): Promise<Classification> {
    const res = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/steps`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ grid: wireGrid }),
    });
    if (!res.ok) throw new Error(`classify failed: ${res.status}`);
    return (await res.json()) as Classification;
  }

  async getModel(): Promise<ModelCard> {
    const res = await this.fetchImpl(`${this.baseUrl}/model`);
    if (!res.ok) throw new Error(`model fetch failed: ${res.status}`);
    return (await res.json()) as ModelCard;
  }
}
