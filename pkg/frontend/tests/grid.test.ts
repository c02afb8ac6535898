import { describe, expect, it } from "vitest";

import { Grid } from "../src/grid.js";
import { GRID_CELLS, TILE_CHARS } from "../src/types.js";

describe("grid wire format", () => {
  it("round-trips an all-floor grid bit-exactly", () => {
    const wire = "F".repeat(GRID_CELLS);
    expect(Grid.fromWire(wire).toWire()).toBe(wire);
  });

  it("round-trips every tile type bit-exactly", () => {
    const cells: string[] = [];
    for (let i = 0; i < GRID_CELLS; i++) {
      cells.push(TILE_CHARS[i % TILE_CHARS.length]);
    }
    const wire = cells.join("");
    expect(Grid.fromWire(wire).toWire()).toBe(wire);
  });

  it("rejects wrong lengths and unknown tiles", () => {
    expect(() => Grid.fromWire("F".repeat(GRID_CELLS - 1))).toThrow(/91/);
    expect(() => Grid.fromWire("X" + "F".repeat(GRID_CELLS - 1))).toThrow(/unknown tile/);
  });

  it("paints immutably and row-major", () => {
    const grid = new Grid();
    const painted = grid.paint(1, 2, "W");
    expect(painted).not.toBeNull();
    expect(grid.toWire()).toBe("F".repeat(GRID_CELLS));
    const wire = painted!.toWire();
    expect(wire[1 * 13 + 2]).toBe("W");
    expect(wire.split("W").length - 1).toBe(1);
  });

  it("returns null for a no-op paint", () => {
    const grid = new Grid();
    expect(grid.paint(0, 0, "F")).toBeNull();
  });

  it("bounds-checks cells", () => {
    expect(() => new Grid().paint(7, 0, "W")).toThrow(/out of bounds/);
    expect(() => new Grid().paint(0, 13, "W")).toThrow(/out of bounds/);
  });
});
