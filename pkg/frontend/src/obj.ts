// Minimal OBJ reader for the assets this service serves: v and f lines,
// fan triangulation, negative and slash-qualified indices. Enough to feed
// a three.js BufferGeometry without pulling in the full loader addon.

export interface ParsedObj {
  positions: Float32Array;
  index: Uint32Array;
}

export function parseObjText(text: string): ParsedObj {
  const positions: number[] = [];
  const index: number[] = [];

  const resolve = (token: string): number => {
    const first = token.split('/', 1)[0] ?? '';
    const value = Number.parseInt(first, 10);
    if (Number.isNaN(value) || value === 0) {
      throw new Error(`bad face index: ${token}`);
    }
    const count = positions.length / 3;
    const zeroBased = value > 0 ? value - 1 : count + value;
    if (zeroBased < 0 || zeroBased >= count) {
      throw new Error(`face index out of range: ${token}`);
    }
    return zeroBased;
  };

  for (const raw of text.split('\n')) {
    const line = raw.trim();
    if (line.startsWith('v ')) {
      const parts = line.slice(2).trim().split(/\s+/);
      if (parts.length < 3) {
        throw new Error(`short vertex line: ${line}`);
      }
      for (let i = 0; i < 3; i += 1) {
        const value = Number.parseFloat(parts[i] ?? '');
        if (Number.isNaN(value)) {
          throw new Error(`bad vertex value: ${line}`);
        }
        positions.push(value);
      }
    } else if (line.startsWith('f ')) {
      const [first, ...rest] = line.slice(2).trim().split(/\s+/).map(resolve);
      if (first === undefined || rest.length < 2) {
        throw new Error(`short face line: ${line}`);
      }
      for (let i = 0; i + 1 < rest.length; i += 1) {
        const second = rest[i];
        const third = rest[i + 1];
        if (second !== undefined && third !== undefined) {
          index.push(first, second, third);
        }
      }
    }
  }
  return {
    positions: new Float32Array(positions),
    index: new Uint32Array(index),
  };
}
