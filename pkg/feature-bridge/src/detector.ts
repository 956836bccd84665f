/**
 * Corner detection and patch description.
 *
 * Detection is the minimum-eigenvalue (Shi–Tomasi) score of the local
 * structure tensor, followed by non-maximum suppression.  Each surviving
 * corner gets a mean-subtracted, L2-normalized intensity patch as its
 * descriptor, so descriptor correlation is directly a confidence in [-1, 1].
 */

import { DetectedImage, GrayImage, Keypoint } from "./types";

export interface DetectorConfig {
  /** Cap on keypoints per image, best scores kept. */
  maxKeypoints?: number;
  /** Keep corners scoring at least this fraction of the image's best. */
  qualityLevel?: number;
  /** Non-maximum suppression radius in pixels. */
  nmsRadius?: number;
  /** Half-width of the square descriptor patch. */
  patchRadius?: number;
}

const DEFAULT_CONFIG: Required<DetectorConfig> = {
  maxKeypoints: 800,
  qualityLevel: 0.01,
  nmsRadius: 4,
  patchRadius: 5,
};

/** Shi–Tomasi corner response for every pixel (borders zero). */
function cornerScores(image: GrayImage): Float64Array {
  const { width, height, data } = image;
  const gx = new Float64Array(width * height);
  const gy = new Float64Array(width * height);
  for (let y = 1; y < height - 1; y++) {
    for (let x = 1; x < width - 1; x++) {
      const p = y * width + x;
      gx[p] = 0.5 * (data[p + 1] - data[p - 1]);
      gy[p] = 0.5 * (data[p + width] - data[p - width]);
    }
  }

  // Structure tensor summed over a (2w+1)^2 window, then lambda_min.
  const w = 2;
  const scores = new Float64Array(width * height);
  for (let y = w + 1; y < height - w - 1; y++) {
    for (let x = w + 1; x < width - w - 1; x++) {
      let sxx = 0;
      let sxy = 0;
      let syy = 0;
      for (let dy = -w; dy <= w; dy++) {
        for (let dx = -w; dx <= w; dx++) {
          const p = (y + dy) * width + (x + dx);
          sxx += gx[p] * gx[p];
          sxy += gx[p] * gy[p];
          syy += gy[p] * gy[p];
        }
      }
      const half = 0.5 * (sxx + syy);
      const root = Math.sqrt(0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy);
      scores[y * width + x] = half - root;
    }
  }
  return scores;
}

/** Detect corners and attach patch descriptors. */
export function detectAndDescribe(image: GrayImage, config: DetectorConfig = {}): DetectedImage {
  const cfg = { ...DEFAULT_CONFIG, ...config };
  const { width, height, data } = image;
  const scores = cornerScores(image);

  let best = 0;
  for (let p = 0; p < scores.length; p++) if (scores[p] > best) best = scores[p];
  const threshold = best * cfg.qualityLevel;

  // Candidates that beat the threshold and are local maxima.
  const margin = cfg.patchRadius + 1;
  const r = cfg.nmsRadius;
  const candidates: Keypoint[] = [];
  for (let y = margin; y < height - margin; y++) {
    for (let x = margin; x < width - margin; x++) {
      const s = scores[y * width + x];
      if (s <= threshold || s <= 0) continue;
      let isMax = true;
      for (let dy = -r; dy <= r && isMax; dy++) {
        for (let dx = -r; dx <= r; dx++) {
          if (dx === 0 && dy === 0) continue;
          const n = scores[(y + dy) * width + (x + dx)];
          // Strict on earlier pixels, non-strict on later: plateaus keep one.
          if (n > s || (n === s && (dy < 0 || (dy === 0 && dx < 0)))) {
            isMax = false;
            break;
          }
        }
      }
      if (isMax) candidates.push({ x, y, score: s });
    }
  }

  candidates.sort((a, b) => b.score - a.score || a.y - b.y || a.x - b.x);
  const keypoints = candidates.slice(0, cfg.maxKeypoints);

  const side = 2 * cfg.patchRadius + 1;
  const descriptors = keypoints.map((kp) => {
    const patch = new Float64Array(side * side);
    let mean = 0;
    let idx = 0;
    for (let dy = -cfg.patchRadius; dy <= cfg.patchRadius; dy++) {
      for (let dx = -cfg.patchRadius; dx <= cfg.patchRadius; dx++) {
        const v = data[(kp.y + dy) * width + (kp.x + dx)];
        patch[idx++] = v;
        mean += v;
      }
    }
    mean /= patch.length;
    let norm = 0;
    for (let i = 0; i < patch.length; i++) {
      patch[i] -= mean;
      norm += patch[i] * patch[i];
    }
    norm = Math.sqrt(norm);
    if (norm > 0) {
      for (let i = 0; i < patch.length; i++) patch[i] /= norm;
    }
    return patch;
  });

  return { keypoints, descriptors, width, height };
}
