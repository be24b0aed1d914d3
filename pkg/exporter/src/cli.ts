#!/usr/bin/env node
/**
 * embed-export: write TNSR embeddings / reconstructions / distances for a
 * dataset manifest.
 *
 * Usage:
 *   embed-export --config job.json
 *   embed-export --manifest m.jsonl --fake-embeddings 16 --out-embeddings e.tnsr
 *   embed-export --manifest m.jsonl --identity-recons --out-recons r.tnsr \
 *       --out-distances d.tnsr [--out-labels l.tnsr] [--images-root DIR] [--seed 42]
 *
 * A config file can name encoder modules for pretrained checkpoints:
 *   {"manifest": "m.jsonl",
 *    "imageEncoder": {"kind": "module", "module": "./clip_encoder.js",
 *                     "options": {"checkpoint": "..."}},
 *    "autoencoder": {"kind": "identity"},
 *    "outputs": {"embeddings": "e.tnsr"}}
 */

import * as fs from 'fs'

import { ExportJob, exportEmbeddings, exportReconstructions } from './export'

function parseArgs(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>()
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]
    if (!arg.startsWith('--')) throw new Error(`unexpected argument ${arg}`)
    const name = arg.slice(2)
    if (name === 'identity-recons' || name === 'help') {
      flags.set(name, 'true')
    } else {
      const value = argv[++i]
      if (value === undefined) throw new Error(`flag --${name} needs a value`)
      flags.set(name, value)
    }
  }
  return flags
}

function buildJob(flags: Map<string, string>): ExportJob {
  let job: ExportJob = { manifest: '', outputs: {} }
  const configPath = flags.get('config')
  if (configPath) {
    job = JSON.parse(fs.readFileSync(configPath, 'utf-8')) as ExportJob
    job.outputs = job.outputs ?? {}
  }
  if (flags.has('manifest')) job.manifest = flags.get('manifest')!
  if (flags.has('images-root')) job.imagesRoot = flags.get('images-root')!
  if (flags.has('seed')) job.seed = Number(flags.get('seed'))
  if (flags.has('fake-embeddings')) {
    job.imageEncoder = { kind: 'fake', options: { dim: Number(flags.get('fake-embeddings')) } }
  }
  if (flags.has('encoder-module')) {
    job.imageEncoder = { kind: 'module', module: flags.get('encoder-module')! }
  }
  if (flags.has('identity-recons')) job.autoencoder = { kind: 'identity' }
  if (flags.has('autoencoder-module')) {
    job.autoencoder = { kind: 'module', module: flags.get('autoencoder-module')! }
  }
  if (flags.has('out-embeddings')) job.outputs.embeddings = flags.get('out-embeddings')!
  if (flags.has('out-recons')) job.outputs.reconstructions = flags.get('out-recons')!
  if (flags.has('out-distances')) job.outputs.distances = flags.get('out-distances')!
  if (flags.has('out-labels')) job.outputs.labels = flags.get('out-labels')!
  if (!job.manifest) throw new Error('a manifest is required (--manifest or config)')
  return job
}

export function main(argv: string[]): number {
  let flags: Map<string, string>
  try {
    flags = parseArgs(argv)
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`)
    return 1
  }
  if (flags.has('help') || flags.size === 0) {
    console.log(
      'embed-export --config job.json | --manifest m.jsonl ' +
        '[--fake-embeddings DIM --out-embeddings E.tnsr] ' +
        '[--identity-recons --out-recons R.tnsr --out-distances D.tnsr] ' +
        '[--out-labels L.tnsr] [--images-root DIR] [--seed N] ' +
        '[--encoder-module mod.js] [--autoencoder-module mod.js]',
    )
    return 0
  }
  try {
    const job = buildJob(flags)
    const written: string[] = []
    let records = 0
    if (job.outputs.embeddings) {
      const res = exportEmbeddings(job)
      records = res.records
      written.push(...res.written)
    }
    if (job.outputs.reconstructions || job.outputs.distances) {
      const res = exportReconstructions({
        ...job,
        outputs: { ...job.outputs, labels: job.outputs.embeddings ? undefined : job.outputs.labels },
      })
      records = res.records
      written.push(...res.written)
    }
    if (written.length === 0) throw new Error('no outputs configured')
    console.log(JSON.stringify({ command: 'embed-export', records, written }))
    return 0
  } catch (err) {
    console.error(`export error: ${(err as Error).message}`)
    return 2
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)))
}
