/** Deterministic synthetic images and homography utilities for tests. */

import * as fs from "fs";
import { PNG } from "pngjs";

import { GrayImage } from "../src/types";

/** mulberry32: tiny deterministic PRNG, uniform in [0, 1). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Checkerboard-like render: a grid of squares with per-square random
 * brightness, so junctions are sharp corners with locally unique patches.
 */
export function renderBoard(width: number, height: number, seed: number, cell = 16): GrayImage {
  const rand = mulberry32(seed);
  const cols = Math.ceil(width / cell);
  const rows = Math.ceil(height / cell);
  const shades: number[][] = [];
  for (let r = 0; r < rows; r++) {
    shades.push(Array.from({ length: cols }, () => 0.1 + 0.8 * rand()));
  }
  const data = new Float64Array(width * height);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      data[y * width + x] = shades[Math.floor(y / cell)][Math.floor(x / cell)];
    }
  }
  return { width, height, data };
}

export function blankImage(width: number, height: number): GrayImage {
  return { width, height, data: new Float64Array(width * height) };
}

/** Apply a row-major 3x3 homography to a point. */
export function applyH(H: number[], x: number, y: number): [number, number] {
  const w = H[6] * x + H[7] * y + H[8];
  return [(H[0] * x + H[1] * y + H[2]) / w, (H[3] * x + H[4] * y + H[5]) / w];
}

export function invertH(H: number[]): number[] {
  const [a, b, c, d, e, f, g, h, i] = H;
  const A = e * i - f * h;
  const B = c * h - b * i;
  const C = b * f - c * e;
  const det = a * A + d * B + g * C;
  return [
    A / det, B / det, C / det,
    (f * g - d * i) / det, (a * i - c * g) / det, (c * d - a * f) / det,
    (d * h - e * g) / det, (b * g - a * h) / det, (a * e - b * d) / det,
  ];
}

/** Warp: out(x) = src(H^-1 x), bilinear sampling, zero outside. */
export function warpImage(src: GrayImage, H: number[]): GrayImage {
  const Hinv = invertH(H);
  const data = new Float64Array(src.width * src.height);
  for (let y = 0; y < src.height; y++) {
    for (let x = 0; x < src.width; x++) {
      const [sx, sy] = applyH(Hinv, x, y);
      const x0 = Math.floor(sx);
      const y0 = Math.floor(sy);
      if (x0 < 0 || y0 < 0 || x0 + 1 >= src.width || y0 + 1 >= src.height) continue;
      const fx = sx - x0;
      const fy = sy - y0;
      const p = y0 * src.width + x0;
      data[y * src.width + x] =
        (1 - fy) * ((1 - fx) * src.data[p] + fx * src.data[p + 1]) +
        fy * ((1 - fx) * src.data[p + src.width] + fx * src.data[p + src.width + 1]);
    }
  }
  return { width: src.width, height: src.height, data };
}

/** One board seen from four nearby viewpoints (identity + mild warps). */
export function mildViews(width: number, height: number, seed: number): GrayImage[] {
  const base = renderBoard(width, height, seed, 12);
  const warps: number[][] = [
    [0.999, -0.02, 4.0, 0.02, 0.999, -2.0, 6e-6, -4e-6, 1.0],
    [1.015, 0.025, -5.0, -0.025, 1.015, 3.0, -7e-6, 5e-6, 1.0],
    [0.99, -0.035, 7.0, 0.035, 0.99, 4.0, 9e-6, 6e-6, 1.0],
  ];
  return [base, ...warps.map((H) => warpImage(base, H))];
}

export function writePgm(path: string, img: GrayImage): void {
  const header = Buffer.from(`P5\n${img.width} ${img.height}\n255\n`, "ascii");
  const pixels = Buffer.alloc(img.width * img.height);
  for (let p = 0; p < pixels.length; p++) {
    pixels[p] = Math.max(0, Math.min(255, Math.round(img.data[p] * 255)));
  }
  fs.writeFileSync(path, Buffer.concat([header, pixels]));
}

export function writePng(path: string, img: GrayImage): void {
  const png = new PNG({ width: img.width, height: img.height });
  for (let p = 0; p < img.width * img.height; p++) {
    const v = Math.max(0, Math.min(255, Math.round(img.data[p] * 255)));
    png.data[4 * p] = v;
    png.data[4 * p + 1] = v;
    png.data[4 * p + 2] = v;
    png.data[4 * p + 3] = 255;
  }
  fs.writeFileSync(path, PNG.sync.write(png));
}
