/**
 * Brute-force descriptor matching: normalized correlation with a ratio test,
 * mutual-best cross-check, and a confidence threshold.
 */

import { DetectedImage, Match } from "./types";

export interface MatcherConfig {
  /** Reject matches whose correlation-based confidence falls below this. */
  confidenceThreshold?: number;
  /** Best-to-second-best distance ratio (lower is stricter). */
  ratioThreshold?: number;
  /** Require the match to be the best in both directions. */
  crossCheck?: boolean;
}

const DEFAULT_CONFIG: Required<MatcherConfig> = {
  confidenceThreshold: 0.2,
  ratioThreshold: 0.9,
  crossCheck: true,
};

/** Descriptors are unit vectors, so correlation is a plain dot product. */
function correlation(a: Float64Array, b: Float64Array): number {
  let dot = 0;
  for (let i = 0; i < a.length; i++) dot += a[i] * b[i];
  return dot;
}

/** Distance equivalent of a correlation between unit vectors. */
function corrDistance(corr: number): number {
  return Math.sqrt(Math.max(0, 2 - 2 * corr));
}

interface BestPair {
  idx: number;
  corr: number;
  second: number;
}

function bestMatches(from: Float64Array[], to: Float64Array[]): BestPair[] {
  const out: BestPair[] = [];
  for (let i = 0; i < from.length; i++) {
    let bestIdx = -1;
    let bestCorr = -Infinity;
    let secondCorr = -Infinity;
    for (let j = 0; j < to.length; j++) {
      const c = correlation(from[i], to[j]);
      if (c > bestCorr) {
        secondCorr = bestCorr;
        bestCorr = c;
        bestIdx = j;
      } else if (c > secondCorr) {
        secondCorr = c;
      }
    }
    out.push({ idx: bestIdx, corr: bestCorr, second: secondCorr });
  }
  return out;
}

/**
 * Match two described images.  Returns index pairs into their keypoint
 * lists with confidences (correlation clamped to [0, 1]), sorted by
 * descending confidence then by aIdx.
 */
export function matchImages(a: DetectedImage, b: DetectedImage, config: MatcherConfig = {}): Match[] {
  const cfg = { ...DEFAULT_CONFIG, ...config };
  if (a.descriptors.length === 0 || b.descriptors.length === 0) return [];

  const forward = bestMatches(a.descriptors, b.descriptors);
  const backward = cfg.crossCheck ? bestMatches(b.descriptors, a.descriptors) : [];

  const matches: Match[] = [];
  for (let i = 0; i < forward.length; i++) {
    const f = forward[i];
    if (f.idx < 0) continue;
    const confidence = Math.max(0, Math.min(1, f.corr));
    if (confidence < cfg.confidenceThreshold) continue;
    if (f.second > -Infinity) {
      const ratio = corrDistance(f.corr) / Math.max(corrDistance(f.second), 1e-12);
      if (ratio > cfg.ratioThreshold) continue;
    }
    if (cfg.crossCheck && backward[f.idx].idx !== i) continue;
    matches.push({ aIdx: i, bIdx: f.idx, confidence });
  }

  matches.sort((m, n) => n.confidence - m.confidence || m.aIdx - n.aIdx);
  return matches;
}
