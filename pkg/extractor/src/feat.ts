/**
 * FEAT binary format: word-aligned feature matrices.
 *
 * Layout, all little-endian:
 *   bytes 0..3    magic "FEAT"
 *   bytes 4..7    u32 format version (1)
 *   bytes 8..15   u64 row count M
 *   bytes 16..23  u64 feature dimension d
 *   bytes 24..27  i32 layer id
 *   bytes 28..31  i32 context length
 *   bytes 32..33  u16 model tag byte length
 *   then the UTF-8 model tag, then M*d f32 values row-major.
 */

export interface FeatHeader {
  rows: number;
  dims: number;
  layerId: number;
  contextLength: number;
  modelTag: string;
}

export interface FeatMatrix extends FeatHeader {
  values: Float32Array;
}

const MAGIC = "FEAT";
const VERSION = 1;

export function encodeFeat(matrix: FeatMatrix): Uint8Array {
  const { rows, dims, layerId, contextLength, modelTag, values } = matrix;
  if (values.length !== rows * dims) {
    throw new Error(`value count ${values.length} does not match ${rows}x${dims}`);
  }
  const tagBytes = new TextEncoder().encode(modelTag);
  if (tagBytes.length > 0xffff) {
    throw new Error(`model tag is ${tagBytes.length} bytes, limit is 65535`);
  }
  const total = 34 + tagBytes.length + values.length * 4;
  const buffer = new ArrayBuffer(total);
  const view = new DataView(buffer);
  const bytes = new Uint8Array(buffer);

  for (let i = 0; i < 4; i++) {
    view.setUint8(i, MAGIC.charCodeAt(i));
  }
  view.setUint32(4, VERSION, true);
  view.setBigUint64(8, BigInt(rows), true);
  view.setBigUint64(16, BigInt(dims), true);
  view.setInt32(24, layerId, true);
  view.setInt32(28, contextLength, true);
  view.setUint16(32, tagBytes.length, true);
  bytes.set(tagBytes, 34);

  let offset = 34 + tagBytes.length;
  for (let i = 0; i < values.length; i++) {
    view.setFloat32(offset, values[i], true);
    offset += 4;
  }
  return bytes;
}

export function decodeFeat(data: Uint8Array, source = "<feat>"): FeatMatrix {
  if (data.length < 34) {
    throw new Error(`${source}: truncated header (${data.length} bytes)`);
  }
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const magic = String.fromCharCode(...data.subarray(0, 4));
  if (magic !== MAGIC) {
    throw new Error(`${source}: bad magic '${magic}'`);
  }
  const version = view.getUint32(4, true);
  if (version !== VERSION) {
    throw new Error(`${source}: unsupported version ${version}`);
  }
  const rows = Number(view.getBigUint64(8, true));
  const dims = Number(view.getBigUint64(16, true));
  const layerId = view.getInt32(24, true);
  const contextLength = view.getInt32(28, true);
  const tagLength = view.getUint16(32, true);
  const payloadStart = 34 + tagLength;
  const expected = payloadStart + rows * dims * 4;
  if (data.length !== expected) {
    throw new Error(`${source}: expected ${expected} bytes, got ${data.length}`);
  }
  const modelTag = new TextDecoder().decode(data.subarray(34, payloadStart));
  const values = new Float32Array(rows * dims);
  for (let i = 0; i < values.length; i++) {
    values[i] = view.getFloat32(payloadStart + i * 4, true);
  }
  return { rows, dims, layerId, contextLength, modelTag, values };
}
