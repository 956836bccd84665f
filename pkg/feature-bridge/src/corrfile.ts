/**
 * Correspondence file (schema version "1"): the cross-package boundary.
 * JSON with round-trip-safe numbers (shortest double representation).
 */

import * as fs from "fs";
import { z } from "zod";

import { PointTriple, SchemaViolation } from "./types";

const finiteNumber = z.number().finite();

const intrinsicsSchema = z
  .object({
    fx: finiteNumber.positive(),
    fy: finiteNumber.positive(),
    cx: finiteNumber,
    cy: finiteNumber,
  })
  .strict();

const tripletBlockSchema = z
  .object({
    views: z.tuple([z.string(), z.string(), z.string()]),
    points: z.array(z.tuple([
      finiteNumber, finiteNumber, finiteNumber,
      finiteNumber, finiteNumber, finiteNumber,
    ])).min(7),
  })
  .strict();

export const correspondenceFileSchema = z
  .object({
    version: z.literal("1"),
    image_size: z.tuple([z.number().int().positive(), z.number().int().positive()]),
    gt_intrinsics: intrinsicsSchema.nullable(),
    init_intrinsics: intrinsicsSchema.nullable(),
    triplets: z.array(tripletBlockSchema).min(1),
  })
  .strict();

export type CorrespondenceFile = z.infer<typeof correspondenceFileSchema>;
export type Intrinsics = z.infer<typeof intrinsicsSchema>;

function formatIssue(issue: z.ZodIssue): string {
  const path = issue.path.map((p) => (typeof p === "number" ? `[${p}]` : `.${p}`)).join("");
  return `$${path}: ${issue.message}`;
}

/** Validate an in-memory document; throws SchemaViolation naming the field. */
export function validateCorrespondenceFile(doc: unknown): CorrespondenceFile {
  const result = correspondenceFileSchema.safeParse(doc);
  if (!result.success) {
    throw new SchemaViolation(formatIssue(result.error.issues[0]));
  }
  return result.data;
}

export interface FileMetadata {
  imageSize: [number, number];
  /** View names per triplet block, three names each. */
  views: Array<[string, string, string]>;
  gtIntrinsics?: Intrinsics | null;
  initIntrinsics?: Intrinsics | null;
}

/** Assemble and validate a document from chained triples plus metadata. */
export function buildCorrespondenceFile(
  triples: PointTriple[][],
  metadata: FileMetadata
): CorrespondenceFile {
  if (triples.length !== metadata.views.length) {
    throw new SchemaViolation(
      `$.triplets: ${triples.length} blocks but ${metadata.views.length} view-name triples`
    );
  }
  const doc = {
    version: "1",
    image_size: metadata.imageSize,
    gt_intrinsics: metadata.gtIntrinsics ?? null,
    init_intrinsics: metadata.initIntrinsics ?? null,
    triplets: triples.map((block, b) => ({
      views: metadata.views[b],
      points: block.map((t) => [t.x1, t.y1, t.x2, t.y2, t.x3, t.y3]),
    })),
  };
  return validateCorrespondenceFile(doc);
}

/** Write a validated document; JSON numbers round-trip bit-exactly. */
export function writeCorrespondenceFile(filePath: string, doc: CorrespondenceFile): void {
  validateCorrespondenceFile(doc);
  fs.writeFileSync(filePath, JSON.stringify(doc, null, 1) + "\n");
}

/** Read and validate a correspondence file. */
export function readCorrespondenceFile(filePath: string): CorrespondenceFile {
  let parsed: unknown;
  try {
    parsed = JSON.parse(fs.readFileSync(filePath, "utf8"));
  } catch (err) {
    throw new SchemaViolation(`$: ${String(err)}`);
  }
  return validateCorrespondenceFile(parsed);
}
