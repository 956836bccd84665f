export { chainPair, chainTriplets } from "./chaining";
export type { ChainedTriplets, ChainingOptions, KeypointCoords } from "./chaining";
export {
  buildCorrespondenceFile,
  correspondenceFileSchema,
  readCorrespondenceFile,
  validateCorrespondenceFile,
  writeCorrespondenceFile,
} from "./corrfile";
export type { CorrespondenceFile, FileMetadata, Intrinsics } from "./corrfile";
export { detectAndDescribe } from "./detector";
export type { DetectorConfig } from "./detector";
export { defaultInitIntrinsics, extractFromDirectory } from "./extract";
export type { ExtractParams, ExtractResult } from "./extract";
export { listImageFiles, readImage } from "./image";
export { matchImages } from "./matcher";
export type { MatcherConfig } from "./matcher";
export {
  MismatchedSizes,
  NoViableTriplet,
  SchemaViolation,
  UnreadableImage,
} from "./types";
export type {
  DetectedImage,
  GrayImage,
  Keypoint,
  Match,
  PairMatches,
  PointTriple,
  TripletSelection,
} from "./types";
