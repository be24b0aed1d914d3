/**
 * Encoder back ends.
 *
 * Built-ins cover every weight-free path: `fake` emits deterministic
 * class-conditioned pseudo-embeddings (mean 10*e_class, unit-variance
 * noise seeded from the record path), `identity` reproduces the decoded
 * input as its own reconstruction.  Real pretrained checkpoints plug in
 * through a module hook: the job config names a JS module exporting
 * `createImageEncoder(options)` / `createAutoencoder(options)`.
 */

import * as path from 'path'

import { RgbImage, loadStandardized } from './image'
import { ManifestRecord, labelId } from './manifest'
import { SplitMix64, fnv1a64 } from './rng'

export interface ImageEncoder {
  readonly dim: number
  /** One embedding row per record, in the given order. */
  encode(records: ManifestRecord[], imagesRoot: string): Float32Array[]
}

export interface Autoencoder {
  reconstruct(img: RgbImage): RgbImage
}

export const CLASS_MEAN_SCALE = 10.0

export class FakeEncoder implements ImageEncoder {
  constructor(
    readonly dim: number = 16,
    private readonly seed: number = 42,
  ) {
    if (dim < 1) throw new Error(`fake encoder dim must be >= 1, got ${dim}`)
  }

  encode(records: ManifestRecord[]): Float32Array[] {
    return records.map((rec) => {
      const cls = labelId(rec.label)
      const streamSeed = fnv1a64(rec.path) ^ (BigInt(this.seed) << 17n) ^ BigInt(cls)
      const noise = new SplitMix64(streamSeed).normals(this.dim)
      const row = new Float32Array(this.dim)
      for (let i = 0; i < this.dim; i++) row[i] = Math.fround(noise[i])
      row[cls % this.dim] = Math.fround(row[cls % this.dim] + CLASS_MEAN_SCALE)
      return row
    })
  }
}

export class IdentityAutoencoder implements Autoencoder {
  reconstruct(img: RgbImage): RgbImage {
    return { width: img.width, height: img.height, pixels: img.pixels.slice() }
  }
}

interface EncoderModule {
  createImageEncoder?: (options: Record<string, unknown>) => ImageEncoder
  createAutoencoder?: (options: Record<string, unknown>) => Autoencoder
}

function loadModule(spec: string, baseDir: string): EncoderModule {
  const resolved = spec.startsWith('.') || spec.startsWith('/')
    ? path.resolve(baseDir, spec)
    : spec
  try {
    // eslint-disable-next-line @typescript-eslint/no-require-imports
    return require(resolved) as EncoderModule
  } catch (err) {
    throw new Error(`model load failure: cannot load encoder module ${spec}: ${(err as Error).message}`)
  }
}

export interface EncoderSpec {
  kind: string
  module?: string
  options?: Record<string, unknown>
}

export function makeImageEncoder(spec: EncoderSpec, seed: number, baseDir: string): ImageEncoder {
  if (spec.kind === 'fake') {
    const dim = typeof spec.options?.dim === 'number' ? (spec.options.dim as number) : 16
    return new FakeEncoder(dim, seed)
  }
  if (spec.kind === 'module') {
    if (!spec.module) throw new Error('model load failure: encoder module path missing')
    const mod = loadModule(spec.module, baseDir)
    if (!mod.createImageEncoder) {
      throw new Error(`model load failure: ${spec.module} exports no createImageEncoder`)
    }
    return mod.createImageEncoder(spec.options ?? {})
  }
  throw new Error(`model load failure: unknown image encoder kind ${JSON.stringify(spec.kind)}`)
}

export function makeAutoencoder(spec: EncoderSpec, baseDir: string): Autoencoder {
  if (spec.kind === 'identity') {
    return new IdentityAutoencoder()
  }
  if (spec.kind === 'module') {
    if (!spec.module) throw new Error('model load failure: autoencoder module path missing')
    const mod = loadModule(spec.module, baseDir)
    if (!mod.createAutoencoder) {
      throw new Error(`model load failure: ${spec.module} exports no createAutoencoder`)
    }
    return mod.createAutoencoder(spec.options ?? {})
  }
  throw new Error(`model load failure: unknown autoencoder kind ${JSON.stringify(spec.kind)}`)
}

/** Image-loading helper shared by reconstruction export paths. */
export function loadRecordImage(rec: ManifestRecord, imagesRoot: string): RgbImage {
  return loadStandardized(path.resolve(imagesRoot, rec.path))
}
