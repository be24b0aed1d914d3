/**
 * Export operations: embeddings, reconstructions, optional distance and
 * label files, all TNSR, all in manifest record order.
 */

import * as path from 'path'

import {
  Autoencoder,
  EncoderSpec,
  ImageEncoder,
  loadRecordImage,
  makeAutoencoder,
  makeImageEncoder,
} from './encoders'
import { SIDE, RgbImage } from './image'
import { ManifestRecord, labelId, readManifest } from './manifest'
import { Dtype, writeTensor } from './tnsr'

export interface ExportJob {
  manifest: string
  imagesRoot?: string
  seed?: number
  imageEncoder?: EncoderSpec
  autoencoder?: EncoderSpec
  outputs: {
    embeddings?: string
    reconstructions?: string
    distances?: string
    labels?: string
  }
  /** Accepted for config compatibility; built-ins always run on cpu. */
  device?: string
}

export interface ExportResult {
  records: number
  written: string[]
}

function requireRecords(job: ExportJob): ManifestRecord[] {
  const records = readManifest(job.manifest)
  if (records.length === 0) throw new Error('empty manifest')
  return records
}

function imagesRoot(job: ExportJob): string {
  return job.imagesRoot ?? path.dirname(path.resolve(job.manifest))
}

export function exportEmbeddings(job: ExportJob): ExportResult {
  if (!job.outputs.embeddings) throw new Error('no embeddings output path configured')
  const records = requireRecords(job)
  const encoder: ImageEncoder = makeImageEncoder(
    job.imageEncoder ?? { kind: 'fake' },
    job.seed ?? 42,
    path.dirname(path.resolve(job.manifest)),
  )
  const rows = encoder.encode(records, imagesRoot(job))
  if (rows.length !== records.length) {
    throw new Error(`encoder produced ${rows.length} rows for ${records.length} records`)
  }
  const dim = encoder.dim
  const flat = new Float32Array(records.length * dim)
  rows.forEach((row, i) => {
    if (row.length !== dim) {
      throw new Error(`row ${i} has dimension ${row.length}, expected ${dim}`)
    }
    flat.set(row, i * dim)
  })
  writeTensor(
    { dtype: Dtype.F32, shape: [records.length, dim], data: flat },
    job.outputs.embeddings,
  )
  const written = [job.outputs.embeddings]
  if (job.outputs.labels) {
    written.push(writeLabels(records, job.outputs.labels))
  }
  return { records: records.length, written }
}

function meanAbsDistance(a: RgbImage, b: RgbImage): number {
  let acc = 0
  for (let i = 0; i < a.pixels.length; i++) acc += Math.abs(b.pixels[i] - a.pixels[i])
  return acc / a.pixels.length
}

export function exportReconstructions(job: ExportJob): ExportResult {
  if (!job.outputs.reconstructions && !job.outputs.distances) {
    throw new Error('no reconstruction or distance output path configured')
  }
  const records = requireRecords(job)
  const autoencoder: Autoencoder = makeAutoencoder(
    job.autoencoder ?? { kind: 'identity' },
    path.dirname(path.resolve(job.manifest)),
  )
  const root = imagesRoot(job)
  const flat = job.outputs.reconstructions
    ? new Float32Array(records.length * SIDE * SIDE * 3)
    : null
  const distances = job.outputs.distances ? new Float32Array(records.length) : null

  records.forEach((rec, i) => {
    let img: RgbImage
    try {
      img = loadRecordImage(rec, root)
    } catch (err) {
      throw new Error(`record ${i} (${rec.path}): ${(err as Error).message}`)
    }
    const recon = autoencoder.reconstruct(img)
    if (recon.width !== SIDE || recon.height !== SIDE) {
      throw new Error(`record ${i}: reconstruction is ${recon.width}x${recon.height}, expected ${SIDE}x${SIDE}`)
    }
    for (let p = 0; p < recon.pixels.length; p++) {
      recon.pixels[p] = Math.fround(Math.min(Math.max(recon.pixels[p], 0), 1))
    }
    if (flat) flat.set(recon.pixels, i * SIDE * SIDE * 3)
    if (distances) distances[i] = Math.fround(meanAbsDistance(img, recon))
  })

  const written: string[] = []
  if (flat && job.outputs.reconstructions) {
    writeTensor(
      { dtype: Dtype.F32, shape: [records.length, SIDE, SIDE, 3], data: flat },
      job.outputs.reconstructions,
    )
    written.push(job.outputs.reconstructions)
  }
  if (distances && job.outputs.distances) {
    writeTensor({ dtype: Dtype.F32, shape: [records.length], data: distances }, job.outputs.distances)
    written.push(job.outputs.distances)
  }
  if (job.outputs.labels) {
    written.push(writeLabels(records, job.outputs.labels))
  }
  return { records: records.length, written }
}

function writeLabels(records: ManifestRecord[], out: string): string {
  const ids = new Uint8Array(records.length)
  records.forEach((rec, i) => {
    ids[i] = labelId(rec.label)
  })
  writeTensor({ dtype: Dtype.U8, shape: [records.length], data: ids }, out)
  return out
}
