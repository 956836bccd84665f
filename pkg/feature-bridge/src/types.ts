/**
 * Shared domain types for the image-triplet correspondence bridge.
 */

/** Single-channel image, intensities in [0, 1], row-major. */
export interface GrayImage {
  width: number;
  height: number;
  data: Float64Array;
}

/** Detected corner with its detection score. */
export interface Keypoint {
  x: number;
  y: number;
  score: number;
}

/** Detected keypoints plus their patch descriptors for one image. */
export interface DetectedImage {
  keypoints: Keypoint[];
  /** One mean-subtracted, L2-normalized patch per keypoint. */
  descriptors: Float64Array[];
  width: number;
  height: number;
}

/** Index pair into the two images' keypoint lists, with match confidence. */
export interface Match {
  aIdx: number;
  bIdx: number;
  /** Normalized correlation of the two patches, clamped to [0, 1]. */
  confidence: number;
}

/** All accepted matches between images i and j (global image indices). */
export interface PairMatches {
  i: number;
  j: number;
  matches: Match[];
}

/** One point correspondence across three views, pixel coordinates. */
export interface PointTriple {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  x3: number;
  y3: number;
}

/** A selected (i, j, k) image triple and the counts that justified it. */
export interface TripletSelection {
  i: number;
  j: number;
  k: number;
  pairCountIJ: number;
  pairCountJK: number;
  chainedCount: number;
}

export class UnreadableImage extends Error {
  constructor(path: string, reason: string) {
    super(`unreadable image ${path}: ${reason}`);
    this.name = "UnreadableImage";
  }
}

export class MismatchedSizes extends Error {
  constructor(detail: string) {
    super(`images differ in size: ${detail}`);
    this.name = "MismatchedSizes";
  }
}

export class NoViableTriplet extends Error {
  constructor(detail: string) {
    super(`no viable image triplet: ${detail}`);
    this.name = "NoViableTriplet";
  }
}

export class SchemaViolation extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "SchemaViolation";
  }
}
