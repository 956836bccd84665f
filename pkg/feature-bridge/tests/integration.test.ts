import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterEach, beforeEach, describe, expect, test } from "vitest";

import { chainTriplets, KeypointCoords } from "../src/chaining";
import {
  buildCorrespondenceFile,
  readCorrespondenceFile,
  writeCorrespondenceFile,
} from "../src/corrfile";
import { Match, PairMatches } from "../src/types";
import { blankImage, mildViews, writePgm } from "./helpers";

const CLI = path.join(__dirname, "..", "dist", "cli.js");
// The calibrator is consumed strictly through its CLI; the numpy backend
// keeps subprocess startup cheap.
const CALIB_ENV = { ...process.env, TRIVIEWCAL_NO_NUMBA: "1" };

function runBridge(...args: string[]) {
  return spawnSync("node", [CLI, ...args], { encoding: "utf8" });
}

function runCalibrator(...args: string[]) {
  return spawnSync("triviewcal", args, { encoding: "utf8", env: CALIB_ENV });
}

let tmpDir: string;
beforeEach(() => {
  tmpDir = fs.mkdtempSync(path.join(os.tmpdir(), "bridge-it-"));
});
afterEach(() => {
  fs.rmSync(tmpDir, { recursive: true, force: true });
});

describe("bridge CLI", () => {
  test("extract writes a file the calibrator parses", () => {
    const dir = path.join(tmpDir, "imgs");
    fs.mkdirSync(dir);
    mildViews(320, 240, 50).forEach((img, v) => writePgm(path.join(dir, `v${v}.pgm`), img));
    const out = path.join(tmpDir, "corr.json");
    const res = runBridge("extract", "--images", dir, "--out", out, "--max-triplets", "2");
    expect(res.status).toBe(0);
    expect(res.stdout).toMatch(/wrote .*corr\.json: \d+ triplet block\(s\)/);
    const doc = readCorrespondenceFile(out);
    expect(doc.triplets.length).toBeLessThanOrEqual(2);
    // The calibrator must accept the schema; these planar views carry no
    // usable three-view geometry, so anything but a schema error (2) is fine.
    const cal = runCalibrator("calibrate", out);
    expect([0, 3]).toContain(cal.status);
  }, 60000);

  test("usage errors exit 2", () => {
    expect(runBridge("extract", "--out", "x.json").status).toBe(2);
    expect(runBridge("extract", "--images", tmpDir).status).toBe(2);
    expect(runBridge("frobnicate").status).toBe(2);
    expect(
      runBridge("extract", "--images", path.join(tmpDir, "nope"), "--out", "x.json").status
    ).toBe(2);
    expect(
      runBridge("extract", "--images", tmpDir, "--out", "x.json", "--min-triples", "-3").status
    ).toBe(2);
  });

  test("undetectable content exits 3", () => {
    const dir = path.join(tmpDir, "blanks");
    fs.mkdirSync(dir);
    for (let v = 0; v < 3; v++) writePgm(path.join(dir, `b${v}.pgm`), blankImage(160, 120));
    const res = runBridge("extract", "--images", dir, "--out", path.join(tmpDir, "x.json"));
    expect(res.status).toBe(3);
    expect(res.stderr).toMatch(/no viable image triplet/);
  }, 30000);
});

describe("round trip with the calibrator", () => {
  function identityMatches(count: number): Match[] {
    return Array.from({ length: count }, (_, t) => ({ aIdx: t, bIdx: t, confidence: 1 }));
  }

  test("calibrator sample -> chaining -> calibrator converges", () => {
    const gtFile = path.join(tmpDir, "gt.json");
    const sample = runCalibrator(
      "export-sample", "--out", gtFile, "--points", "120", "--seed", "11"
    );
    expect(sample.status).toBe(0);

    // The calibrator's own output must satisfy the bridge-side schema.
    const gt = readCorrespondenceFile(gtFile);
    const rows = gt.triplets[0].points;

    // Route the triples through the chaining path as three keypoint lists.
    const coords: KeypointCoords = [0, 2, 4].map((c) =>
      rows.map((row) => ({ x: row[c], y: row[c + 1] }))
    );
    const pairs: PairMatches[] = [
      { i: 0, j: 1, matches: identityMatches(rows.length) },
      { i: 1, j: 2, matches: identityMatches(rows.length) },
    ];
    const { selections, triples } = chainTriplets(coords, pairs);
    expect(selections[0].chainedCount).toBe(rows.length);
    expect(triples[0].map((t) => [t.x1, t.y1, t.x2, t.y2, t.x3, t.y3])).toEqual(rows);

    const bridgeFile = path.join(tmpDir, "bridge.json");
    writeCorrespondenceFile(
      bridgeFile,
      buildCorrespondenceFile(triples, {
        imageSize: gt.image_size,
        views: [gt.triplets[0].views],
        gtIntrinsics: gt.gt_intrinsics,
        initIntrinsics: gt.init_intrinsics,
      })
    );

    const cal = runCalibrator("calibrate", bridgeFile, "--json");
    expect(cal.status).toBe(0);
    const report = JSON.parse(cal.stdout);
    expect(report.converged).toBe(true);
    expect(report.mean_error_percent).toBeLessThan(0.1);
  }, 60000);

  test("minimal one-triplet file parses with exit 0", () => {
    const gtFile = path.join(tmpDir, "gt.json");
    runCalibrator("export-sample", "--out", gtFile, "--points", "60", "--seed", "12");
    const gt = readCorrespondenceFile(gtFile);

    const minimal = buildCorrespondenceFile(
      [gt.triplets[0].points.map((r) => ({ x1: r[0], y1: r[1], x2: r[2], y2: r[3], x3: r[4], y3: r[5] }))],
      {
        imageSize: gt.image_size,
        views: [["v1.png", "v2.png", "v3.png"]],
        initIntrinsics: gt.init_intrinsics,
      }
    );
    const file = path.join(tmpDir, "minimal.json");
    writeCorrespondenceFile(file, minimal);
    const cal = runCalibrator("calibrate", file);
    expect(cal.status).toBe(0);
    expect(cal.stdout).toMatch(/converged: true/);
  }, 60000);
});
