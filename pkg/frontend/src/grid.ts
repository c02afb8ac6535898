import { GRID_CELLS, GRID_HEIGHT, GRID_WIDTH, TILE_CHARS, TileChar } from "./types.js";

/** A 13x7 room held as tile characters; serializes bit-exactly to the
 * service's 91-character row-major wire format. */
export class Grid {
  private cells: TileChar[];

  constructor(cells?: TileChar[]) {
    if (cells) {
      if (cells.length !== GRID_CELLS) {
        throw new Error(`grid needs ${GRID_CELLS} cells, got ${cells.length}`);
      }
      this.cells = [...cells];
    } else {
      this.cells = new Array(GRID_CELLS).fill("F");
    }
  }

  static fromWire(wire: string): Grid {
    if (wire.length !== GRID_CELLS) {
      throw new Error(`wire grid must have ${GRID_CELLS} characters, got ${wire.length}`);
    }
    const cells: TileChar[] = [];
    for (const ch of wire) {
      if (!TILE_CHARS.includes(ch as TileChar)) {
        throw new Error(`unknown tile character ${JSON.stringify(ch)}`);
      }
      cells.push(ch as TileChar);
    }
    return new Grid(cells);
  }

  toWire(): string {
    return this.cells.join("");
  }

  get(row: number, col: number): TileChar {
    this.checkBounds(row, col);
    return this.cells[row * GRID_WIDTH + col];
  }

  /** Returns a new grid with the cell painted; null when the paint is a no-op. */
  paint(row: number, col: number, brush: TileChar): Grid | null {
    this.checkBounds(row, col);
    if (this.cells[row * GRID_WIDTH + col] === brush) {
      return null;
    }
    const next = [...this.cells];
    next[row * GRID_WIDTH + col] = brush;
    return new Grid(next);
  }

  clone(): Grid {
    return new Grid(this.cells);
  }

  private checkBounds(row: number, col: number): void {
    if (row < 0 || row >= GRID_HEIGHT || col < 0 || col >= GRID_WIDTH) {
      throw new Error(`cell (${row}, ${col}) out of bounds`);
    }
  }
}
