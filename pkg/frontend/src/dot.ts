// Minimal reader for the server's DOT exports. Used by the end-to-end
// check that the client's highlight set equals the server's, and by the
// raw-DOT download affordance.

const EDGE_LINE = /^\s*("(?:[^"\\]|\\.)*")\s*(->|--)\s*("(?:[^"\\]|\\.)*")\s*(?:\[(.*)\])?;$/;

function unquote(raw: string): string {
  return raw.slice(1, -1).replace(/\\(.)/g, "$1");
}

/**
 * The set of highlighted element keys in a DOT document, spelled
 * `"A" -> "B"` or `"A" -- "B"` to match the view-model keys.
 */
export function parseDotHighlights(dot: string): Set<string> {
  const keys = new Set<string>();
  for (const line of dot.split("\n")) {
    const m = EDGE_LINE.exec(line);
    if (!m || !m[4]) continue;
    if (!m[4].includes('highlight="true"')) continue;
    keys.add(`"${unquote(m[1])}" ${m[2]} "${unquote(m[3])}"`);
  }
  return keys;
}

/** All edge statements, highlighted or not, for spot checks. */
export function parseDotEdges(dot: string): string[] {
  const out: string[] = [];
  for (const line of dot.split("\n")) {
    const m = EDGE_LINE.exec(line);
    if (m) out.push(`"${unquote(m[1])}" ${m[2]} "${unquote(m[3])}"`);
  }
  return out;
}
