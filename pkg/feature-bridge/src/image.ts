/**
 * Image loading: PNG (via pngjs) and the netpbm formats PGM/PPM, converted
 * to single-channel float images in [0, 1].
 */

import * as fs from "fs";
import * as path from "path";
import { PNG } from "pngjs";

import { GrayImage, UnreadableImage } from "./types";

const SUPPORTED_EXTENSIONS = [".png", ".pgm", ".ppm"];

/** Rec. 601 luma weights, the usual gray conversion. */
function luma(r: number, g: number, b: number): number {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

function decodePng(filePath: string, buffer: Buffer): GrayImage {
  let png: PNG;
  try {
    png = PNG.sync.read(buffer);
  } catch (err) {
    throw new UnreadableImage(filePath, String(err));
  }
  const data = new Float64Array(png.width * png.height);
  for (let p = 0; p < data.length; p++) {
    const o = p * 4;
    data[p] = luma(png.data[o], png.data[o + 1], png.data[o + 2]) / 255;
  }
  return { width: png.width, height: png.height, data };
}

/**
 * Minimal netpbm parser: P2/P5 (gray) and P3/P6 (color), maxval <= 65535,
 * '#' comments allowed in the header.
 */
function decodeNetpbm(filePath: string, buffer: Buffer): GrayImage {
  const fail = (reason: string): never => {
    throw new UnreadableImage(filePath, reason);
  };

  let pos = 0;
  const readToken = (): string => {
    // Skip whitespace and comments.
    for (;;) {
      while (pos < buffer.length && /\s/.test(String.fromCharCode(buffer[pos]))) pos++;
      if (pos < buffer.length && buffer[pos] === 0x23) {
        while (pos < buffer.length && buffer[pos] !== 0x0a) pos++;
      } else {
        break;
      }
    }
    const start = pos;
    while (pos < buffer.length && !/\s/.test(String.fromCharCode(buffer[pos]))) pos++;
    if (start === pos) fail("truncated header");
    return buffer.toString("ascii", start, pos);
  };

  const magic = readToken();
  if (!["P2", "P3", "P5", "P6"].includes(magic)) fail(`unsupported magic ${magic}`);
  const width = parseInt(readToken(), 10);
  const height = parseInt(readToken(), 10);
  const maxval = parseInt(readToken(), 10);
  if (!(width > 0 && height > 0 && maxval > 0 && maxval <= 65535)) fail("bad dimensions");
  const channels = magic === "P3" || magic === "P6" ? 3 : 1;
  const count = width * height * channels;

  const samples = new Float64Array(count);
  if (magic === "P2" || magic === "P3") {
    for (let s = 0; s < count; s++) {
      const v = parseInt(readToken(), 10);
      if (!Number.isFinite(v)) fail("truncated pixel data");
      samples[s] = v;
    }
  } else {
    pos++; // single whitespace byte after maxval
    const wide = maxval > 255;
    const need = count * (wide ? 2 : 1);
    if (buffer.length - pos < need) fail("truncated pixel data");
    for (let s = 0; s < count; s++) {
      samples[s] = wide ? buffer.readUInt16BE(pos + 2 * s) : buffer[pos + s];
    }
  }

  const data = new Float64Array(width * height);
  for (let p = 0; p < data.length; p++) {
    data[p] =
      channels === 1
        ? samples[p] / maxval
        : luma(samples[3 * p], samples[3 * p + 1], samples[3 * p + 2]) / maxval;
  }
  return { width, height, data };
}

/** Load a supported image file as a grayscale float image. */
export function readImage(filePath: string): GrayImage {
  const ext = path.extname(filePath).toLowerCase();
  if (!SUPPORTED_EXTENSIONS.includes(ext)) {
    throw new UnreadableImage(filePath, `unsupported extension ${ext || "(none)"}`);
  }
  let buffer: Buffer;
  try {
    buffer = fs.readFileSync(filePath);
  } catch (err) {
    throw new UnreadableImage(filePath, String(err));
  }
  return ext === ".png" ? decodePng(filePath, buffer) : decodeNetpbm(filePath, buffer);
}

/** Supported image files in a directory, sorted by name for determinism. */
export function listImageFiles(dir: string): string[] {
  const entries = fs.readdirSync(dir, { withFileTypes: true });
  return entries
    .filter((e) => e.isFile() && SUPPORTED_EXTENSIONS.includes(path.extname(e.name).toLowerCase()))
    .map((e) => path.join(dir, e.name))
    .sort();
}
