/**
 * TNSR tensor container, byte-compatible with the consumer toolkit:
 * magic "TNSR", version 0x01, dtype byte (1 = f32, 2 = u8), ndim byte,
 * ndim u32 little-endian dims, then the raw little-endian payload.
 */

import * as fs from 'fs'

export const MAGIC = Buffer.from('TNSR', 'ascii')
export const VERSION = 1

export enum Dtype {
  F32 = 1,
  U8 = 2,
}

export interface Tensor {
  dtype: Dtype
  shape: number[]
  /** Row-major scalars; Float32Array for F32, Uint8Array for U8. */
  data: Float32Array | Uint8Array
}

const MAX_NDIM = 4
const U32_MAX = 0xffffffff

function elementCount(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1)
}

export function encodeTensor(t: Tensor): Buffer {
  if (t.shape.length < 1 || t.shape.length > MAX_NDIM) {
    throw new Error(`shape must have 1..${MAX_NDIM} dims, got ${t.shape.length}`)
  }
  for (const d of t.shape) {
    if (!Number.isInteger(d) || d < 1) throw new Error(`all dims must be >= 1, got ${t.shape}`)
    if (d > U32_MAX) throw new Error(`dimension overflows u32: ${d}`)
  }
  const count = elementCount(t.shape)
  if (t.data.length !== count) {
    throw new Error(`shape ${t.shape} needs ${count} scalars, data has ${t.data.length}`)
  }
  const header = Buffer.alloc(7 + 4 * t.shape.length)
  MAGIC.copy(header, 0)
  header.writeUInt8(VERSION, 4)
  header.writeUInt8(t.dtype, 5)
  header.writeUInt8(t.shape.length, 6)
  t.shape.forEach((d, i) => header.writeUInt32LE(d, 7 + 4 * i))

  let payload: Buffer
  if (t.dtype === Dtype.F32) {
    payload = Buffer.alloc(4 * count)
    const arr = t.data as Float32Array
    for (let i = 0; i < count; i++) payload.writeFloatLE(arr[i], 4 * i)
  } else {
    payload = Buffer.from(t.data as Uint8Array)
  }
  return Buffer.concat([header, payload])
}

export function decodeTensor(buf: Buffer): Tensor {
  if (buf.length < 4 || !buf.subarray(0, 4).equals(MAGIC)) {
    throw new Error(`bad magic ${JSON.stringify(buf.subarray(0, 4).toString('latin1'))}`)
  }
  if (buf.length < 7) throw new Error(`truncated header: ${buf.length} bytes`)
  const version = buf.readUInt8(4)
  if (version !== VERSION) throw new Error(`unknown version ${version}`)
  const dtype = buf.readUInt8(5) as Dtype
  if (dtype !== Dtype.F32 && dtype !== Dtype.U8) throw new Error(`unknown dtype code ${dtype}`)
  const ndim = buf.readUInt8(6)
  if (ndim < 1 || ndim > MAX_NDIM) throw new Error(`ndim ${ndim} outside 1..${MAX_NDIM}`)
  const dimsEnd = 7 + 4 * ndim
  if (buf.length < dimsEnd) throw new Error(`truncated dims: ${buf.length} bytes`)
  const shape: number[] = []
  for (let i = 0; i < ndim; i++) shape.push(buf.readUInt32LE(7 + 4 * i))
  if (shape.some((d) => d < 1)) throw new Error(`zero dimension in ${shape}`)

  const count = elementCount(shape)
  const itemSize = dtype === Dtype.F32 ? 4 : 1
  const expected = count * itemSize
  const actual = buf.length - dimsEnd
  if (actual !== expected) {
    throw new Error(`payload is ${actual} bytes, expected ${expected} for shape [${shape}]`)
  }
  let data: Float32Array | Uint8Array
  if (dtype === Dtype.F32) {
    const arr = new Float32Array(count)
    for (let i = 0; i < count; i++) arr[i] = buf.readFloatLE(dimsEnd + 4 * i)
    data = arr
  } else {
    data = new Uint8Array(buf.subarray(dimsEnd))
  }
  return { dtype, shape, data }
}

export function writeTensor(t: Tensor, path: string): void {
  fs.writeFileSync(path, encodeTensor(t))
}

export function readTensor(path: string): Tensor {
  return decodeTensor(fs.readFileSync(path))
}
