/**
 * Parser for the flat observation buffer layout file shipped by the
 * environment. The layout text is the cross-language contract: each
 * non-comment line is `name dtype shape`, fields packed in order,
 * little-endian, no padding. The adapter parses the text it receives
 * in the hello response instead of hard-coding offsets.
 */

export type Dtype = "uint8" | "int16" | "int32";

const ITEM_SIZE: Record<Dtype, number> = { uint8: 1, int16: 2, int32: 4 };

export interface LayoutField {
  name: string;
  dtype: Dtype;
  shape: number[];
  offset: number;
  count: number;
  nbytes: number;
}

export type ObsArray = Uint8Array | Int16Array | Int32Array;

export interface Observation {
  [key: string]: ObsArray;
}

export class LayoutError extends Error {}

export class Layout {
  readonly fields: LayoutField[];
  readonly byName: Map<string, LayoutField>;
  readonly totalBytes: number;

  constructor(fields: LayoutField[]) {
    if (fields.length === 0) throw new LayoutError("layout has no fields");
    this.fields = fields;
    this.byName = new Map(fields.map((f) => [f.name, f]));
    const last = fields[fields.length - 1];
    this.totalBytes = last.offset + last.nbytes;
  }

  /** Unpack a flat buffer into one typed array per field (copies). */
  unpack(buf: Buffer): Observation {
    if (buf.length !== this.totalBytes) {
      throw new LayoutError(
        `buffer is ${buf.length} bytes, layout needs ${this.totalBytes}`);
    }
    const obs: Observation = {};
    for (const f of this.fields) {
      // slice to a fresh ArrayBuffer so views are aligned and owned
      const bytes = Uint8Array.prototype.slice.call(
        buf, f.offset, f.offset + f.nbytes);
      obs[f.name] =
        f.dtype === "uint8" ? bytes :
        f.dtype === "int16" ? new Int16Array(bytes.buffer) :
        new Int32Array(bytes.buffer);
    }
    return obs;
  }
}

export function parseLayout(text: string): Layout {
  const fields: LayoutField[] = [];
  let offset = 0;
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    if (parts.length !== 3) {
      throw new LayoutError(`line ${i + 1}: expected 3 columns`);
    }
    const [name, dtype, shapeText] = parts;
    if (!(dtype in ITEM_SIZE)) {
      throw new LayoutError(`line ${i + 1}: unknown dtype ${dtype}`);
    }
    const shape = shapeText.split("x").map((d) => {
      const n = Number(d);
      if (!Number.isInteger(n) || n <= 0) {
        throw new LayoutError(`line ${i + 1}: bad shape ${shapeText}`);
      }
      return n;
    });
    const count = shape.reduce((a, b) => a * b, 1);
    const nbytes = count * ITEM_SIZE[dtype as Dtype];
    fields.push({ name, dtype: dtype as Dtype, shape, offset, count, nbytes });
    offset += nbytes;
  }
  return new Layout(fields);
}
