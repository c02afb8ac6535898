import { describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { EditorSession } from "../src/editor.js";
import { Grid } from "../src/grid.js";
import { Classification, TileChar } from "../src/types.js";
import { FakeService } from "./fake_service.js";

function makeClient(service: FakeService): ServiceClient {
  return new ServiceClient("", service.fetch);
}

/** 30 scripted edits, each guaranteed to change the grid. */
function scriptedEdits(): Array<[number, number, TileChar]> {
  const edits: Array<[number, number, TileChar]> = [];
  const tiles: TileChar[] = ["W", "E", "T", "B", "D"];
  for (let i = 0; i < 25; i++) {
    edits.push([i % 7, (i * 3) % 13, tiles[i % tiles.length]]);
  }
  // five re-paints of earlier cells with different tiles
  for (let i = 0; i < 5; i++) {
    edits.push([i % 7, (i * 3) % 13, tiles[(i + 1) % tiles.length]]);
  }
  return edits;
}

describe("editor session", () => {
  it("acceptance 10: scripted edits classify identically to direct posts", async () => {
    // drive the editor through 30 paints
    const editorService = new FakeService();
    const viaEditor: Classification[] = [];
    const editor = await EditorSession.open(makeClient(editorService), {
      onState: (e) => {
        if (e.lastClassification &&
            viaEditor[viaEditor.length - 1] !== e.lastClassification) {
          viaEditor.push(e.lastClassification);
        }
      },
    });
    const edits = scriptedEdits();
    for (const [row, col, tile] of edits) {
      expect(editor.paint(row, col, tile)).toBe(true);
    }
    await editor.settle();
    expect(viaEditor).toHaveLength(30);

    // replay the same grid sequence directly against a fresh service
    const directService = new FakeService();
    let grid = new Grid();
    const sid = directService.createSession();
    const direct: Classification[] = [];
    for (const [row, col, tile] of edits) {
      grid = grid.paint(row, col, tile)!;
      direct.push(directService.classify(sid, grid.toWire()));
    }

    expect(editorService.postedGrids).toEqual(directService.postedGrids);
    expect(viaEditor.map((c) => c.cluster)).toEqual(direct.map((c) => c.cluster));
    expect(viaEditor.map((c) => c.path)).toEqual(direct.map((c) => c.path));
    // the editor's breadcrumb mirrors the final server path
    expect(editor.breadcrumb).toEqual(direct[direct.length - 1].path);
  });

  it("suppresses no-op paints entirely", async () => {
    const service = new FakeService();
    const editor = await EditorSession.open(makeClient(service));
    expect(editor.paint(0, 0, "F")).toBe(false); // already floor
    expect(editor.paint(0, 0, "W")).toBe(true);
    expect(editor.paint(0, 0, "W")).toBe(false); // same tile again
    await editor.settle();
    expect(service.postedGrids).toHaveLength(1);
  });

  it("undo restores the previous snapshot and classifies it", async () => {
    const service = new FakeService();
    const editor = await EditorSession.open(makeClient(service));
    editor.paint(2, 2, "W");
    editor.paint(3, 3, "E");
    expect(editor.undo()).toBe(true);
    await editor.settle();
    expect(editor.grid.get(3, 3)).toBe("F");
    expect(editor.grid.get(2, 2)).toBe("W");
    expect(service.postedGrids).toHaveLength(3);
    expect(service.postedGrids[2]).toBe(service.postedGrids[0]);
    expect(editor.undo()).toBe(true);
    expect(editor.undo()).toBe(false); // stack exhausted
  });

  it("queues edits while offline and flushes them in order", async () => {
    const service = new FakeService();
    const connectivity: boolean[] = [];
    const editor = await EditorSession.open(makeClient(service), {
      onConnectivity: (online) => connectivity.push(online),
    });
    editor.paint(0, 0, "W");
    await editor.settle();

    service.failing = true;
    editor.paint(0, 1, "E");
    editor.paint(0, 2, "T");
    editor.paint(0, 3, "B");
    await editor.settle();
    expect(editor.offline).toBe(true);
    expect(editor.queuedSteps).toBe(3);
    expect(connectivity).toEqual([false]);
    // edits were never blocked: the local grid has all of them
    expect(editor.grid.get(0, 3)).toBe("B");

    service.failing = false;
    await editor.reconnect();
    expect(editor.offline).toBe(false);
    expect(editor.queuedSteps).toBe(0);
    expect(connectivity).toEqual([false, true]);

    // order matches a direct replay of the same grids
    const directService = new FakeService();
    let grid = new Grid();
    const sid = directService.createSession();
    for (const [row, col, tile] of [[0, 0, "W"], [0, 1, "E"], [0, 2, "T"], [0, 3, "B"]] as
         Array<[number, number, TileChar]>) {
      grid = grid.paint(row, col, tile)!;
      directService.classify(sid, grid.toWire());
    }
    expect(service.postedGrids).toEqual(directService.postedGrids);
  });

  it("keeps the server from ever mutating the local grid", async () => {
    const service = new FakeService();
    const editor = await EditorSession.open(makeClient(service));
    editor.paint(4, 4, "T");
    const before = editor.grid.toWire();
    await editor.settle(); // classification arrives
    expect(editor.grid.toWire()).toBe(before);
  });
});
