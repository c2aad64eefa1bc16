import { describe, expect, it } from "vitest";
import { parseDotEdges, parseDotHighlights } from "../src/dot.js";

// Shape copied from a live server response.
const EFFECTS_DOT = `digraph dagcraft {
  rankdir=LR;
  node [shape=box, fontname="Helvetica"];
  "Energy_Yield";
  "Rotational_RPM";
  "Sea_Temperature";
  "Rotational_RPM" -> "Energy_Yield" [label="0.764431 (0.001061)"];
  "Sea_Temperature" -> "Energy_Yield" [label="-0.011413 (0.368119)", color="crimson", fontcolor="crimson", penwidth=2.4, highlight="true"];
  label="model fit p=0.859883 adj=0.88439\\nintersection p=0 adj=0";
  labelloc=b;
}
`;

const INDUCED_DOT = `graph dagcraft {
  rankdir=LR;
  node [shape=box, fontname="Helvetica"];
  "Energy_Yield";
  "Wind_Speed";
  "Energy_Yield" -- "Energy_Yield" [style=dashed, label="0.00725597 (0)"];
  "Wind_Speed" -- "Energy_Yield" [style=dashed, label="-0.030636 (0.0941)", color="crimson", fontcolor="crimson", penwidth=2.4, highlight="true"];
}
`;

describe("parseDotHighlights", () => {
  it("collects only edges marked highlight=true", () => {
    expect(parseDotHighlights(EFFECTS_DOT)).toEqual(
      new Set(['"Sea_Temperature" -> "Energy_Yield"']),
    );
  });

  it("reads undirected statements from the induced view", () => {
    expect(parseDotHighlights(INDUCED_DOT)).toEqual(
      new Set(['"Wind_Speed" -- "Energy_Yield"']),
    );
  });

  it("ignores node statements and the graph label", () => {
    const noHighlights = EFFECTS_DOT.replace(/, highlight="true"/g, "");
    expect(parseDotHighlights(noHighlights)).toEqual(new Set());
  });

  it("unescapes quoted names", () => {
    const dot = '  "od\\"d" -> "plain" [highlight="true"];\n';
    expect(parseDotHighlights(dot)).toEqual(new Set(['"od"d" -> "plain"']));
  });
});

describe("parseDotEdges", () => {
  it("lists every edge statement, highlighted or not", () => {
    expect(parseDotEdges(EFFECTS_DOT)).toEqual([
      '"Rotational_RPM" -> "Energy_Yield"',
      '"Sea_Temperature" -> "Energy_Yield"',
    ]);
    expect(parseDotEdges(INDUCED_DOT)).toHaveLength(2);
  });
});
