import { ServiceClient } from "./api.js";
import { Classification } from "./types.js";

export interface QueueEvents {
  onClassification: (c: Classification) => void;
  onConnectivity?: (online: boolean) => void;
}

/** FIFO classification queue: one in-flight request at a time, per-session
 * order preserved. A transport failure switches to offline mode; queued
 * steps are retained and flushed in order on the next flush() call. The
 * editor is never blocked on the network. */
export class StepQueue {
  private pending: string[] = [];
  private pumpPromise: Promise<void> | null = null;
  private offline = false;

  constructor(
    private readonly client: ServiceClient,
    private readonly sessionId: string,
    private readonly events: QueueEvents,
  ) {}

  get isOffline(): boolean {
    return this.offline;
  }

  get queuedCount(): number {
    return this.pending.length;
  }

  /** Enqueue a wire-format grid for classification. */
  push(wireGrid: string): void {
    this.pending.push(wireGrid);
    this.ensurePump();
  }

  /** Leave offline mode and resume sending; resolves when the queue drains
   * or goes offline again. */
  async flush(): Promise<void> {
    if (this.offline) {
      this.offline = false;
      this.events.onConnectivity?.(true);
    }
    this.ensurePump();
    await this.drain();
  }

  /** Resolves once no pump is running (drained or offline). */
  async drain(): Promise<void> {
    while (this.pumpPromise) {
      await this.pumpPromise;
    }
  }

  private ensurePump(): void {
    if (this.pumpPromise || this.offline || this.pending.length === 0) return;
    this.pumpPromise = this.pump().finally(() => {
      this.pumpPromise = null;
    });
  }

  private async pump(): Promise<void> {
    while (this.pending.length > 0 && !this.offline) {
      const wire = this.pending[0];
      try {
        const classification = await this.client.postStep(this.sessionId, wire);
        this.pending.shift();
        this.events.onClassification(classification);
      } catch {
        this.offline = true;
        this.events.onConnectivity?.(false);
      }
    }
  }
}
