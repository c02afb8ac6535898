import { ServiceClient } from "./api.js";
import { EditorSession } from "./editor.js";
import { buildPanelModel, PanelModel } from "./panel.js";
import { GRID_HEIGHT, GRID_WIDTH, ModelCard, TILE_CHARS, TILE_NAMES, TileChar } from "./types.js";

const TILE_COLORS: Record<TileChar, string> = {
  F: "#222222",
  W: "#d8d8d8",
  E: "#d62728",
  B: "#7a1010",
  T: "#e6c619",
  D: "#1f5fd6",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, cls?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderThumbnail(wire: string): HTMLElement {
  const thumb = el("div", "thumb");
  thumb.style.gridTemplateColumns = `repeat(${GRID_WIDTH}, 6px)`;
  for (const ch of wire) {
    const cell = el("div", "thumb-cell");
    cell.style.background = TILE_COLORS[ch as TileChar] ?? "#000";
    thumb.appendChild(cell);
  }
  return thumb;
}

class EditorApp {
  private editor!: EditorSession;
  private model: ModelCard | null = null;
  private cells: HTMLElement[] = [];
  private stale = false;

  constructor(private readonly root: HTMLElement, private readonly client: ServiceClient) {}

  async start(): Promise<void> {
    this.editor = await EditorSession.open(this.client, {
      onState: () => {
        this.stale = false;
        this.renderGrid();
        this.renderPanel();
      },
      onConnectivity: (online) => {
        this.stale = !online;
        this.renderPanel();
        this.renderStatus();
      },
    });
    try {
      this.model = await this.client.getModel();
    } catch {
      this.model = null; // panel falls back to thumbnail-less suggestions
    }
    this.buildLayout();
    this.renderGrid();
    this.renderPanel();
    this.renderStatus();
  }

  private buildLayout(): void {
    this.root.innerHTML = "";
    const left = el("div", "left");
    const palette = el("div", "palette");
    for (const tile of TILE_CHARS) {
      const button = el("button", "brush", TILE_NAMES[tile]);
      button.dataset.tile = tile;
      button.style.borderColor = TILE_COLORS[tile];
      button.addEventListener("click", () => {
        this.editor.brush = tile;
        palette.querySelectorAll(".brush").forEach((b) => b.classList.remove("active"));
        button.classList.add("active");
      });
      if (tile === this.editor.brush) button.classList.add("active");
      palette.appendChild(button);
    }
    left.appendChild(palette);

    const board = el("div", "board");
    board.style.gridTemplateColumns = `repeat(${GRID_WIDTH}, 34px)`;
    for (let row = 0; row < GRID_HEIGHT; row++) {
      for (let col = 0; col < GRID_WIDTH; col++) {
        const cell = el("div", "cell");
        cell.addEventListener("click", () => {
          this.editor.paint(row, col);
        });
        this.cells.push(cell);
        board.appendChild(cell);
      }
    }
    left.appendChild(board);

    const controls = el("div", "controls");
    const undo = el("button", "control", "undo");
    undo.addEventListener("click", () => this.editor.undo());
    const retry = el("button", "control", "reconnect");
    retry.addEventListener("click", () => void this.editor.reconnect());
    controls.append(undo, retry);
    left.appendChild(controls);
    left.appendChild(el("div", "status"));

    this.root.appendChild(left);
    this.root.appendChild(el("div", "panel"));
  }

  private renderGrid(): void {
    const wire = this.editor.grid.toWire();
    for (let i = 0; i < wire.length; i++) {
      this.cells[i].style.background = TILE_COLORS[wire[i] as TileChar];
    }
  }

  private renderStatus(): void {
    const status = this.root.querySelector(".status");
    if (!status) return;
    status.textContent = this.editor.offline
      ? `offline: ${this.editor.queuedSteps} edits queued`
      : `session ${this.editor.sessionId}`;
  }

  private renderPanel(): void {
    const panel = this.root.querySelector(".panel");
    if (!panel) return;
    const view: PanelModel = buildPanelModel(
      this.editor.lastClassification, this.model, this.stale);
    panel.innerHTML = "";
    panel.appendChild(el("h2", undefined, "style classification"));
    if (view.stale) panel.appendChild(el("div", "stale-badge", "stale (offline)"));
    if (view.cluster === null) {
      panel.appendChild(el("p", "hint", "paint a tile to classify this room"));
      return;
    }
    panel.appendChild(el("p", "cluster", `current cluster: ${view.cluster}`));
    panel.appendChild(el("p", "breadcrumb",
      `path: {${view.breadcrumb.join(">")}}`));

    const arch = el("div", "archetypes");
    for (const a of view.archetypes) {
      const row = el("div", "arch-row");
      row.appendChild(el("span", "arch-name", `${a.name} (${a.matched}/${a.total})`));
      const bar = el("div", "bar");
      const fill = el("div", "bar-fill");
      fill.style.width = `${Math.round(a.fraction * 100)}%`;
      bar.appendChild(fill);
      row.appendChild(bar);
      arch.appendChild(row);
    }
    panel.appendChild(arch);

    const suggestions = el("div", "suggestions");
    if (view.notice) {
      suggestions.appendChild(el("p", "notice", view.notice));
    }
    for (const s of view.suggestions) {
      const card = el("div", "card");
      card.appendChild(el("div", "card-title",
        `next: cluster ${s.cluster} (w=${s.weight.toFixed(1)})`));
      if (s.thumbnail) card.appendChild(renderThumbnail(s.thumbnail));
      suggestions.appendChild(card);
    }
    panel.appendChild(suggestions);
    this.renderStatus();
  }
}

const root = document.getElementById("app");
if (root) {
  const base = (window as unknown as { SERVICE_URL?: string }).SERVICE_URL ?? "";
  void new EditorApp(root, new ServiceClient(base)).start();
}
