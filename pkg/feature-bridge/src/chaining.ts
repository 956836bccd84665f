/**
 * Three-view chaining of pairwise matches: a point triple is emitted when a
 * match a<->b between images (i, j) and a match b<->c between (j, k) share
 * the keypoint b.  Triplets are ranked by their chained-match count.
 */

import {
  Match,
  NoViableTriplet,
  PairMatches,
  PointTriple,
  TripletSelection,
} from "./types";

export interface ChainingOptions {
  /** Keep only triplets with at least this many chained triples. */
  minTriples?: number;
  /** Keep at most this many triplets after ranking (null = all). */
  maxTriplets?: number | null;
  /** A constituent pair must have at least this many matches. */
  minPairMatches?: number;
}

const DEFAULT_OPTIONS: Required<ChainingOptions> = {
  minTriples: 50,
  maxTriplets: null,
  minPairMatches: 7,
};

/** Point positions per image, indexed like the match indices. */
export type KeypointCoords = Array<Array<{ x: number; y: number }>>;

export interface ChainedTriplets {
  selections: TripletSelection[];
  /** Parallel to selections: the chained triples of each selected (i,j,k). */
  triples: PointTriple[][];
}

/**
 * Chain two match lists through their shared middle image.  Emits
 * (i-index, j-index, k-index) in the order of the (i,j) matches; when two
 * (j,k) matches leave the same j keypoint, the first one listed wins.
 */
export function chainPair(ij: Match[], jk: Match[]): Array<[number, number, number]> {
  const jToK = new Map<number, number>();
  for (const m of jk) {
    if (!jToK.has(m.aIdx)) jToK.set(m.aIdx, m.bIdx);
  }
  const chains: Array<[number, number, number]> = [];
  const seenJ = new Set<number>();
  for (const m of ij) {
    const k = jToK.get(m.bIdx);
    if (k === undefined || seenJ.has(m.bIdx)) continue;
    seenJ.add(m.bIdx);
    chains.push([m.aIdx, m.bIdx, k]);
  }
  return chains;
}

/**
 * Form and rank image triplets from pairwise matches.
 *
 * Every (i, j, k) with i < j < k whose pairs (i,j) and (j,k) both meet
 * `minPairMatches` is a candidate; candidates with at least `minTriples`
 * chained triples are kept, ranked by chained count (ties: index order),
 * and truncated to `maxTriplets`.
 */
export function chainTriplets(
  coords: KeypointCoords,
  pairs: PairMatches[],
  options: ChainingOptions = {}
): ChainedTriplets {
  const opts = { ...DEFAULT_OPTIONS, ...options };
  const byPair = new Map<string, Match[]>();
  for (const p of pairs) byPair.set(`${p.i},${p.j}`, p.matches);

  interface Candidate extends TripletSelection {
    chains: Array<[number, number, number]>;
  }
  const candidates: Candidate[] = [];
  let examined = 0;
  let bestCount = 0;
  const n = coords.length;
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      const ij = byPair.get(`${i},${j}`);
      if (!ij || ij.length < opts.minPairMatches) continue;
      for (let k = j + 1; k < n; k++) {
        const jk = byPair.get(`${j},${k}`);
        if (!jk || jk.length < opts.minPairMatches) continue;
        examined++;
        const chains = chainPair(ij, jk);
        bestCount = Math.max(bestCount, chains.length);
        if (chains.length >= opts.minTriples) {
          candidates.push({
            i,
            j,
            k,
            pairCountIJ: ij.length,
            pairCountJK: jk.length,
            chainedCount: chains.length,
            chains,
          });
        }
      }
    }
  }

  candidates.sort(
    (a, b) => b.chainedCount - a.chainedCount || a.i - b.i || a.j - b.j || a.k - b.k
  );
  const kept = opts.maxTriplets === null ? candidates : candidates.slice(0, opts.maxTriplets);
  if (kept.length === 0) {
    throw new NoViableTriplet(
      `${examined} candidate triple(s) examined, best chained count ${bestCount} < ${opts.minTriples}`
    );
  }

  const selections: TripletSelection[] = [];
  const triples: PointTriple[][] = [];
  for (const c of kept) {
    selections.push({
      i: c.i,
      j: c.j,
      k: c.k,
      pairCountIJ: c.pairCountIJ,
      pairCountJK: c.pairCountJK,
      chainedCount: c.chainedCount,
    });
    triples.push(
      c.chains.map(([a, b, d]) => ({
        x1: coords[c.i][a].x,
        y1: coords[c.i][a].y,
        x2: coords[c.j][b].x,
        y2: coords[c.j][b].y,
        x3: coords[c.k][d].x,
        y3: coords[c.k][d].y,
      }))
    );
  }
  return { selections, triples };
}
