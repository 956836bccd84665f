/**
 * Directory-to-file pipeline: load images, detect and match, chain triples,
 * assemble a correspondence file document.
 */

import * as path from "path";

import { chainTriplets, KeypointCoords } from "./chaining";
import {
  buildCorrespondenceFile,
  CorrespondenceFile,
  Intrinsics,
} from "./corrfile";
import { detectAndDescribe } from "./detector";
import { listImageFiles, readImage } from "./image";
import { matchImages } from "./matcher";
import {
  DetectedImage,
  MismatchedSizes,
  NoViableTriplet,
  PairMatches,
  TripletSelection,
} from "./types";

export interface ExtractParams {
  /** Keep only triplets with at least this many chained triples. */
  minTriples?: number;
  /** Keep at most this many ranked triplets (null = all viable). */
  maxTriplets?: number | null;
  /** Match confidence threshold. */
  confidenceThreshold?: number;
  /** Keypoint cap per image. */
  maxKeypoints?: number;
  /** Omit the image-size-derived initial intrinsics guess. */
  noInit?: boolean;
}

const DEFAULT_PARAMS: Required<ExtractParams> = {
  minTriples: 50,
  maxTriplets: null,
  confidenceThreshold: 0.2,
  maxKeypoints: 800,
  noInit: false,
};

export interface ExtractResult {
  doc: CorrespondenceFile;
  selections: TripletSelection[];
  imagePaths: string[];
  pairMatchCounts: number[];
}

/**
 * Coarse starting intrinsics from the image size alone: principal point at
 * the center, focal length of one long side.  The calibrator refines from
 * here (or callers override via its --init flag).
 */
export function defaultInitIntrinsics(width: number, height: number): Intrinsics {
  const f = Math.max(width, height);
  return { fx: f, fy: f, cx: width / 2, cy: height / 2 };
}

/** Run the full pipeline on a directory of images. */
export function extractFromDirectory(dir: string, params: ExtractParams = {}): ExtractResult {
  const cfg = { ...DEFAULT_PARAMS, ...params };
  const imagePaths = listImageFiles(dir);
  if (imagePaths.length < 3) {
    throw new NoViableTriplet(`only ${imagePaths.length} readable image(s) in ${dir}`);
  }

  const images = imagePaths.map(readImage);
  for (let i = 1; i < images.length; i++) {
    if (images[i].width !== images[0].width || images[i].height !== images[0].height) {
      throw new MismatchedSizes(
        `${path.basename(imagePaths[0])} is ${images[0].width}x${images[0].height}, ` +
          `${path.basename(imagePaths[i])} is ${images[i].width}x${images[i].height}`
      );
    }
  }

  const detected: DetectedImage[] = images.map((img) =>
    detectAndDescribe(img, { maxKeypoints: cfg.maxKeypoints })
  );

  const pairs: PairMatches[] = [];
  for (let i = 0; i < detected.length; i++) {
    for (let j = i + 1; j < detected.length; j++) {
      pairs.push({
        i,
        j,
        matches: matchImages(detected[i], detected[j], {
          confidenceThreshold: cfg.confidenceThreshold,
        }),
      });
    }
  }

  const coords: KeypointCoords = detected.map((d) => d.keypoints);
  const { selections, triples } = chainTriplets(coords, pairs, {
    minTriples: cfg.minTriples,
    maxTriplets: cfg.maxTriplets,
  });

  const views = selections.map(
    (s) =>
      [
        path.basename(imagePaths[s.i]),
        path.basename(imagePaths[s.j]),
        path.basename(imagePaths[s.k]),
      ] as [string, string, string]
  );
  const doc = buildCorrespondenceFile(triples, {
    imageSize: [images[0].width, images[0].height],
    views,
    initIntrinsics: cfg.noInit ? null : defaultInitIntrinsics(images[0].width, images[0].height),
  });

  return { doc, selections, imagePaths, pairMatchCounts: pairs.map((p) => p.matches.length) };
}
