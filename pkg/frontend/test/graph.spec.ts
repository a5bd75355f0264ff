import { describe, expect, it } from "vitest";

import { choiceFromClass, classFromChoice, loadGraphData,
         validClasses } from "../src/graph.js";
import { FIG2, condense, tempDir, writeGraph } from "./helpers.js";

const dir = tempDir();
const fig2Path = writeGraph(FIG2, dir, "fig2.json");
const cond = condense(fig2Path);

describe("condensed graph loading", () => {
  it("keeps the condensed node set and route order", () => {
    const data = loadGraphData(cond);
    expect(data.nodeIds).toEqual([0, 3]);
    expect(data.splitIds).toEqual([3]);
    expect(data.routeCounts).toEqual([2]);
    expect(data.numClasses).toBe(3);
  });

  it("maps both record views onto message arrays", () => {
    const data = loadGraphData(cond);
    // 2 splitting paths x 2 views + 3 entry chains x 1 view
    expect(data.recv.length).toBe(7);
    const toSplit = Array.from(data.recv).filter(
      (r) => data.nodeIds[r] === 3).length;
    const toDa = Array.from(data.recv).filter(
      (r) => data.nodeIds[r] === 0).length;
    expect(toSplit).toBe(5); // 2 outgoing views + 3 entry chains
    expect(toDa).toBe(2);    // 2 incoming views
    // entry-chain records have no neighbor embedding
    const missing = Array.from(data.nbr).filter((x) => x === -1).length;
    expect(missing).toBe(3);
  });

  it("standardizes features per column", () => {
    const data = loadGraphData(cond);
    for (let j = 0; j < data.edgeDim; j++) {
      let mean = 0;
      const rows = data.recv.length;
      for (let i = 0; i < rows; i++) mean += data.edgeFeatures[i * data.edgeDim + j];
      expect(Math.abs(mean / rows)).toBeLessThan(1e-9);
    }
  });

  it("class/choice mapping puts no-route last", () => {
    const data = loadGraphData(cond);
    expect(choiceFromClass(data, 0)).toBe(0);
    expect(choiceFromClass(data, 2)).toBe(-1);
    expect(classFromChoice(data, -1)).toBe(2);
    expect(validClasses(data, 0)).toEqual([0, 1, 2]);
  });

  it("masks only invalid classes", () => {
    const widened = {
      ...cond,
      route_order: { "3": [1, 2], "99": [1, 2, 5] },
    };
    const data = loadGraphData({
      ...widened,
      nodes: [...cond.nodes, { id: 99, features: [0, 1, 3, 0, 2, 2, 0] }],
    });
    expect(data.numClasses).toBe(4);
    // node 3 (d=2): classes 0,1 valid, 2 invalid, 3 = NONE valid
    expect(Array.from(data.classMask.slice(0, 4))).toEqual([0, 0, -1e9, 0]);
    // node 99 (d=3): everything valid
    expect(Array.from(data.classMask.slice(4, 8))).toEqual([0, 0, 0, 0]);
  });
});
