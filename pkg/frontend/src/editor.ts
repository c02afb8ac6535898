import { ServiceClient } from "./api.js";
import { Grid } from "./grid.js";
import { QueueEvents, StepQueue } from "./queue.js";
import { Classification, TileChar } from "./types.js";

export interface EditorEvents {
  onState?: (editor: EditorSession) => void;
  onConnectivity?: (online: boolean) => void;
}

/** Editor state machine, DOM-free: optimistic local grid, full-snapshot undo
 * stack, and an ordered async classification loop. The server only ever
 * annotates; it never mutates the designer's grid. */
export class EditorSession {
  grid: Grid = new Grid();
  brush: TileChar = "W";
  lastClassification: Classification | null = null;
  /** Mirrors the server-computed compressed style path. */
  breadcrumb: number[] = [];

  private undoStack: Grid[] = [];
  private queue: StepQueue;

  private constructor(
    readonly sessionId: string,
    client: ServiceClient,
    private readonly events: EditorEvents,
  ) {
    const queueEvents: QueueEvents = {
      onClassification: (c) => {
        this.lastClassification = c;
        this.breadcrumb = [...c.path];
        this.events.onState?.(this);
      },
      onConnectivity: (online) => this.events.onConnectivity?.(online),
    };
    this.queue = new StepQueue(client, this.sessionId, queueEvents);
  }

  static async open(client: ServiceClient, events: EditorEvents = {}): Promise<EditorSession> {
    const sessionId = await client.createSession();
    return new EditorSession(sessionId, client, events);
  }

  get offline(): boolean {
    return this.queue.isOffline;
  }

  get queuedSteps(): number {
    return this.queue.queuedCount;
  }

  /** Paint one cell with the current (or given) brush. Painting the same
   * tile over itself is a no-op and posts nothing. */
  paint(row: number, col: number, brush?: TileChar): boolean {
    const next = this.grid.paint(row, col, brush ?? this.brush);
    if (next === null) return false;
    this.undoStack.push(this.grid);
    this.grid = next;
    this.queue.push(next.toWire());
    this.events.onState?.(this);
    return true;
  }

  /** Undo restores the previous snapshot; the restored state is a new edit
   * from the service's point of view and is classified like any other. */
  undo(): boolean {
    const prev = this.undoStack.pop();
    if (!prev) return false;
    this.grid = prev;
    this.queue.push(prev.toWire());
    this.events.onState?.(this);
    return true;
  }

  /** Flush steps queued while offline, preserving edit order. */
  async reconnect(): Promise<void> {
    await this.queue.flush();
  }

  /** Resolves once every queued step has been classified (or the queue went
   * offline). */
  async settle(): Promise<void> {
    await this.queue.drain();
  }
}
