/**
 * Condensed-graph loading: turns the solver CLI's `condense` JSON into
 * message-passing arrays.
 *
 * Each JSON edge record is one directed message: direction flag 0 is
 * the outgoing view stored at the path's first node (receiver = from,
 * neighbor = to), flag 1 the incoming view at the terminal (receiver =
 * to, neighbor = from; entry-chain records use from = -1 and have no
 * neighbor embedding).
 */

export interface CondensedJson {
  nodes: { id: number; features: number[] }[];
  edges: { from: number; to: number; features: number[];
           path_edges: number[] }[];
  route_order: Record<string, number[]>;
}

export interface GraphData {
  nodeIds: number[];
  nodeFeatures: Float64Array;      // [numNodes x nodeDim], standardized
  nodeDim: number;
  recv: Int32Array;                // receiver node index per message
  nbr: Int32Array;                 // neighbor node index, -1 = none
  edgeFeatures: Float64Array;      // [numMessages x edgeDim], standardized
  edgeDim: number;
  splitIds: number[];              // splitting node ids, ascending
  splitIdx: Int32Array;            // their positions in nodeIds
  routeCounts: number[];           // d_i per splitting node
  numClasses: number;              // max d_i + 1 (last class = no route)
  classMask: Float64Array;         // [numSplits x numClasses], 0 or -1e9
}

function standardize(data: Float64Array, rows: number, cols: number): void {
  for (let j = 0; j < cols; j++) {
    let mean = 0;
    for (let i = 0; i < rows; i++) mean += data[i * cols + j];
    mean /= Math.max(rows, 1);
    let variance = 0;
    for (let i = 0; i < rows; i++) {
      const d = data[i * cols + j] - mean;
      variance += d * d;
    }
    const std = Math.sqrt(variance / Math.max(rows, 1));
    for (let i = 0; i < rows; i++) {
      data[i * cols + j] = std > 1e-12 ? (data[i * cols + j] - mean) / std
                                       : 0;
    }
  }
}

export function loadGraphData(cond: CondensedJson): GraphData {
  const nodeIds = cond.nodes.map((n) => n.id);
  const index = new Map<number, number>();
  nodeIds.forEach((id, i) => index.set(id, i));

  const nodeDim = cond.nodes.length > 0 ? cond.nodes[0].features.length : 7;
  const nodeFeatures = new Float64Array(nodeIds.length * nodeDim);
  cond.nodes.forEach((n, i) => {
    n.features.forEach((v, j) => { nodeFeatures[i * nodeDim + j] = v; });
  });
  standardize(nodeFeatures, nodeIds.length, nodeDim);

  const recv: number[] = [];
  const nbr: number[] = [];
  const feats: number[][] = [];
  for (const rec of cond.edges) {
    const flag = rec.features[rec.features.length - 1];
    if (flag === 0) {
      if (!index.has(rec.from)) continue; // defensive: malformed record
      recv.push(index.get(rec.from)!);
      nbr.push(index.has(rec.to) ? index.get(rec.to)! : -1);
    } else {
      if (!index.has(rec.to)) continue;
      recv.push(index.get(rec.to)!);
      nbr.push(index.has(rec.from) ? index.get(rec.from)! : -1);
    }
    feats.push(rec.features);
  }
  const edgeDim = feats.length > 0 ? feats[0].length : 6;
  const edgeFeatures = new Float64Array(feats.length * edgeDim);
  feats.forEach((f, i) => {
    f.forEach((v, j) => { edgeFeatures[i * edgeDim + j] = v; });
  });
  standardize(edgeFeatures, feats.length, edgeDim);

  const splitIds = Object.keys(cond.route_order).map(Number)
    .sort((a, b) => a - b);
  const routeCounts = splitIds.map((id) => cond.route_order[String(id)].length);
  const maxRoutes = routeCounts.length > 0 ? Math.max(...routeCounts) : 0;
  const numClasses = maxRoutes + 1;
  const classMask = new Float64Array(splitIds.length * numClasses);
  splitIds.forEach((_, i) => {
    for (let c = 0; c < numClasses; c++) {
      const valid = c < routeCounts[i] || c === numClasses - 1;
      classMask[i * numClasses + c] = valid ? 0 : -1e9;
    }
  });

  return {
    nodeIds,
    nodeFeatures,
    nodeDim,
    recv: Int32Array.from(recv),
    nbr: Int32Array.from(nbr),
    edgeFeatures,
    edgeDim,
    splitIds,
    splitIdx: Int32Array.from(splitIds.map((id) => index.get(id)!)),
    routeCounts,
    numClasses,
    classMask,
  };
}

/** Class index -> route choice (-1 = take no route). */
export function choiceFromClass(data: GraphData, cls: number): number {
  return cls === data.numClasses - 1 ? -1 : cls;
}

/** Route choice -> class index. */
export function classFromChoice(data: GraphData, choice: number): number {
  return choice === -1 ? data.numClasses - 1 : choice;
}

/** Valid class indices for one splitting node (its routes + no-route). */
export function validClasses(data: GraphData, splitPos: number): number[] {
  const out: number[] = [];
  for (let c = 0; c < data.routeCounts[splitPos]; c++) out.push(c);
  out.push(data.numClasses - 1);
  return out;
}
