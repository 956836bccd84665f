#!/usr/bin/env node
/**
 * Command-line entry point.
 *
 *   feature-bridge extract --images DIR --out FILE
 *       [--max-triplets M] [--min-triples 50] [--threshold 0.2]
 *       [--max-keypoints 800] [--no-init]
 *
 * Exit codes: 0 success, 2 usage/input error, 3 no viable triplet.
 */

import { parseArgs } from "util";

import { writeCorrespondenceFile } from "./corrfile";
import { extractFromDirectory } from "./extract";
import { MismatchedSizes, NoViableTriplet, SchemaViolation, UnreadableImage } from "./types";

const EXIT_OK = 0;
const EXIT_USAGE = 2;
const EXIT_NO_MODEL = 3;

function usageError(message: string): number {
  process.stderr.write(`error: ${message}\n`);
  return EXIT_USAGE;
}

function parsePositiveInt(value: string, flag: string): number {
  const n = Number(value);
  if (!Number.isInteger(n) || n < 1) {
    throw new RangeError(`${flag} expects a positive integer, got ${value}`);
  }
  return n;
}

export function main(argv: string[]): number {
  if (argv[0] !== "extract") {
    return usageError(`unknown command ${argv[0] ?? "(none)"}; expected: extract`);
  }

  let values;
  try {
    ({ values } = parseArgs({
      args: argv.slice(1),
      options: {
        images: { type: "string" },
        out: { type: "string" },
        "max-triplets": { type: "string" },
        "min-triples": { type: "string", default: "50" },
        threshold: { type: "string", default: "0.2" },
        "max-keypoints": { type: "string", default: "800" },
        "no-init": { type: "boolean", default: false },
      },
    }));
  } catch (err) {
    return usageError(String((err as Error).message));
  }
  if (!values.images || !values.out) {
    return usageError("--images DIR and --out FILE are required");
  }

  try {
    const threshold = Number(values.threshold);
    if (!(threshold >= 0 && threshold <= 1)) {
      throw new RangeError(`--threshold expects a value in [0, 1], got ${values.threshold}`);
    }
    const result = extractFromDirectory(values.images, {
      minTriples: parsePositiveInt(values["min-triples"]!, "--min-triples"),
      maxTriplets:
        values["max-triplets"] === undefined
          ? null
          : parsePositiveInt(values["max-triplets"], "--max-triplets"),
      confidenceThreshold: threshold,
      maxKeypoints: parsePositiveInt(values["max-keypoints"]!, "--max-keypoints"),
      noInit: values["no-init"]!,
    });
    writeCorrespondenceFile(values.out, result.doc);
    const total = result.doc.triplets.reduce((acc, t) => acc + t.points.length, 0);
    process.stdout.write(
      `wrote ${values.out}: ${result.doc.triplets.length} triplet block(s), ` +
        `${total} triples (${result.imagePaths.length} images)\n`
    );
    return EXIT_OK;
  } catch (err) {
    if (err instanceof NoViableTriplet) {
      process.stderr.write(`error: ${err.message}\n`);
      return EXIT_NO_MODEL;
    }
    if (
      err instanceof UnreadableImage ||
      err instanceof MismatchedSizes ||
      err instanceof SchemaViolation ||
      err instanceof RangeError ||
      typeof (err as NodeJS.ErrnoException).code === "string" // fs errors
    ) {
      return usageError((err as Error).message);
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
