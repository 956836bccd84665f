import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterEach, beforeEach, describe, expect, test } from "vitest";

import {
  buildCorrespondenceFile,
  CorrespondenceFile,
  readCorrespondenceFile,
  validateCorrespondenceFile,
  writeCorrespondenceFile,
} from "../src/corrfile";
import { SchemaViolation } from "../src/types";

let tmpDir: string;
beforeEach(() => {
  tmpDir = fs.mkdtempSync(path.join(os.tmpdir(), "corrfile-"));
});
afterEach(() => {
  fs.rmSync(tmpDir, { recursive: true, force: true });
});

function sampleDoc(): CorrespondenceFile {
  const points = Array.from({ length: 9 }, (_, t) => [
    t + Math.PI,
    t + 0.1 + 0.2,
    t + 1 / 3,
    t + 123456.78901234567,
    t + 1e-13,
    t * 7.000000000000001,
  ]) as CorrespondenceFile["triplets"][number]["points"];
  return {
    version: "1",
    image_size: [1280, 720],
    gt_intrinsics: null,
    init_intrinsics: { fx: 1000.0000000000002, fy: 999.9999999999999, cx: 640, cy: 360 },
    triplets: [{ views: ["a.png", "b.png", "c.png"], points }],
  };
}

describe("round trip", () => {
  test("numbers survive write/read bit-exactly", () => {
    const doc = sampleDoc();
    const file = path.join(tmpDir, "doc.json");
    writeCorrespondenceFile(file, doc);
    const back = readCorrespondenceFile(file);
    expect(back).toEqual(doc);
    // Bitwise, not approximate: shortest-repr JSON numbers reparse exactly.
    back.triplets[0].points.forEach((row, r) => {
      row.forEach((v, c) => {
        expect(Object.is(v, doc.triplets[0].points[r][c])).toBe(true);
      });
    });
    expect(Object.is(back.init_intrinsics!.fx, 1000.0000000000002)).toBe(true);
  });

  test("buildCorrespondenceFile assembles blocks and metadata", () => {
    const triples = Array.from({ length: 8 }, (_, t) => ({
      x1: t, y1: t + 0.5, x2: 2 * t, y2: t - 1, x3: 3 * t, y3: 0.25 * t,
    }));
    const doc = buildCorrespondenceFile([triples], {
      imageSize: [640, 480],
      views: [["i0.pgm", "i1.pgm", "i2.pgm"]],
    });
    expect(doc.version).toBe("1");
    expect(doc.init_intrinsics).toBeNull();
    expect(doc.triplets[0].points[3]).toEqual([3, 3.5, 6, 2, 9, 0.75]);
  });

  test("block/view count mismatch is rejected", () => {
    expect(() => buildCorrespondenceFile([], { imageSize: [10, 10], views: [["a", "b", "c"]] }))
      .toThrow(SchemaViolation);
  });
});

describe("validation", () => {
  const cases: Array<[string, (doc: any) => void, RegExp]> = [
    ["wrong version", (d) => (d.version = "2"), /\$\.version/],
    ["zero width", (d) => (d.image_size[0] = 0), /\$\.image_size\[0\]/],
    ["fractional height", (d) => (d.image_size[1] = 720.5), /\$\.image_size\[1\]/],
    ["negative fx", (d) => (d.init_intrinsics.fx = -5), /\$\.init_intrinsics\.fx/],
    ["missing cy", (d) => delete d.init_intrinsics.cy, /\$\.init_intrinsics\.cy/],
    ["string coordinate", (d) => (d.triplets[0].points[2][4] = "x"), /\$\.triplets\[0\]\.points\[2\]\[4\]/],
    ["short row", (d) => d.triplets[0].points[1].pop(), /\$\.triplets\[0\]\.points\[1\]/],
    ["too few rows", (d) => (d.triplets[0].points = d.triplets[0].points.slice(0, 6)), /\$\.triplets\[0\]\.points/],
    ["two views", (d) => (d.triplets[0].views = ["a", "b"]), /\$\.triplets\[0\]\.views/],
    ["non-finite", (d) => (d.triplets[0].points[0][0] = Infinity), /\$\.triplets\[0\]\.points\[0\]\[0\]/],
    ["extra key", (d) => (d.extra = 1), /\$/],
    ["no triplets", (d) => (d.triplets = []), /\$\.triplets/],
  ];

  test.each(cases)("%s names the offending field", (_name, mutate, pattern) => {
    const doc: any = JSON.parse(JSON.stringify(sampleDoc()));
    mutate(doc);
    expect(() => validateCorrespondenceFile(doc)).toThrow(pattern);
    expect(() => validateCorrespondenceFile(doc)).toThrow(SchemaViolation);
  });

  test("unparseable file reports SchemaViolation", () => {
    const file = path.join(tmpDir, "bad.json");
    fs.writeFileSync(file, "{not json");
    expect(() => readCorrespondenceFile(file)).toThrow(SchemaViolation);
    expect(() => readCorrespondenceFile(path.join(tmpDir, "absent.json"))).toThrow(
      SchemaViolation
    );
  });
});
