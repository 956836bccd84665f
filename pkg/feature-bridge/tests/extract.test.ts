import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterEach, beforeEach, describe, expect, test } from "vitest";

import { validateCorrespondenceFile } from "../src/corrfile";
import { defaultInitIntrinsics, extractFromDirectory } from "../src/extract";
import { readImage } from "../src/image";
import { MismatchedSizes, NoViableTriplet, UnreadableImage } from "../src/types";
import { blankImage, mildViews, renderBoard, writePgm, writePng } from "./helpers";

let tmpDir: string;
beforeEach(() => {
  tmpDir = fs.mkdtempSync(path.join(os.tmpdir(), "extract-"));
});
afterEach(() => {
  fs.rmSync(tmpDir, { recursive: true, force: true });
});

describe("image reading", () => {
  test("pgm and png loaders agree on the same image", () => {
    const img = renderBoard(96, 64, 30);
    writePgm(path.join(tmpDir, "a.pgm"), img);
    writePng(path.join(tmpDir, "a.png"), img);
    const fromPgm = readImage(path.join(tmpDir, "a.pgm"));
    const fromPng = readImage(path.join(tmpDir, "a.png"));
    expect(fromPng.width).toBe(96);
    expect(fromPgm.width).toBe(96);
    for (let p = 0; p < img.data.length; p++) {
      expect(Math.abs(fromPgm.data[p] - fromPng.data[p])).toBeLessThan(1e-12);
    }
  });

  test("unsupported and corrupt files raise UnreadableImage", () => {
    const bad = path.join(tmpDir, "a.txt");
    fs.writeFileSync(bad, "hello");
    expect(() => readImage(bad)).toThrow(UnreadableImage);
    const trunc = path.join(tmpDir, "b.pgm");
    fs.writeFileSync(trunc, "P5\n10 10\n255\nxx");
    expect(() => readImage(trunc)).toThrow(UnreadableImage);
    expect(() => readImage(path.join(tmpDir, "missing.png"))).toThrow(UnreadableImage);
  });
});

describe("extractFromDirectory", () => {
  test("planar views of one board yield a valid correspondence document", () => {
    const views = mildViews(320, 240, 40);
    views.forEach((img, v) => writePgm(path.join(tmpDir, `view${v}.pgm`), img));
    const { doc, selections, pairMatchCounts } = extractFromDirectory(tmpDir);
    validateCorrespondenceFile(doc);
    expect(doc.image_size).toEqual([320, 240]);
    expect(selections.length).toBeGreaterThanOrEqual(1);
    for (const block of doc.triplets) {
      expect(block.points.length).toBeGreaterThanOrEqual(50);
      for (const name of block.views) expect(name).toMatch(/^view\d\.pgm$/);
    }
    // Selections stay ranked by chained count.
    for (let s = 1; s < selections.length; s++) {
      expect(selections[s].chainedCount).toBeLessThanOrEqual(selections[s - 1].chainedCount);
    }
    expect(Math.max(...pairMatchCounts)).toBeGreaterThan(50);
    expect(doc.init_intrinsics).toEqual(defaultInitIntrinsics(320, 240));
  });

  test("maxTriplets caps the kept blocks", () => {
    const views = mildViews(320, 240, 41);
    views.forEach((img, v) => writePgm(path.join(tmpDir, `view${v}.pgm`), img));
    const { doc } = extractFromDirectory(tmpDir, { maxTriplets: 1 });
    expect(doc.triplets).toHaveLength(1);
  });

  test("blank images leave no viable triplet", () => {
    for (let v = 0; v < 3; v++) {
      writePgm(path.join(tmpDir, `blank${v}.pgm`), blankImage(160, 120));
    }
    expect(() => extractFromDirectory(tmpDir)).toThrow(NoViableTriplet);
  });

  test("fewer than three images is not viable", () => {
    writePgm(path.join(tmpDir, "only.pgm"), renderBoard(160, 120, 42));
    expect(() => extractFromDirectory(tmpDir)).toThrow(NoViableTriplet);
  });

  test("size mismatch is rejected", () => {
    writePgm(path.join(tmpDir, "a.pgm"), renderBoard(160, 120, 43));
    writePgm(path.join(tmpDir, "b.pgm"), renderBoard(160, 120, 43));
    writePgm(path.join(tmpDir, "c.pgm"), renderBoard(200, 120, 43));
    expect(() => extractFromDirectory(tmpDir)).toThrow(MismatchedSizes);
  });
});
