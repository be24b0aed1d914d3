import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'

import { describe, expect, it } from 'vitest'

import { CLASS_MEAN_SCALE, FakeEncoder } from '../src/encoders'
import { LABELS, ManifestRecord } from '../src/manifest'
import { exportEmbeddings } from '../src/export'

function records(n: number): ManifestRecord[] {
  const out: ManifestRecord[] = []
  for (let i = 0; i < n; i++) {
    out.push({
      path: `img${i}.png`,
      label: LABELS[i % LABELS.length],
      split: 'train',
    })
  }
  return out
}

function writeManifest(recs: ManifestRecord[]): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'fake-'))
  const file = path.join(dir, 'm.jsonl')
  fs.writeFileSync(file, recs.map((r) => JSON.stringify(r)).join('\n') + '\n')
  return file
}

describe('fake encoder', () => {
  it('is deterministic per (path, label, seed)', () => {
    const recs = records(12)
    const a = new FakeEncoder(16, 42).encode(recs)
    const b = new FakeEncoder(16, 42).encode(recs)
    for (let i = 0; i < recs.length; i++) {
      expect(Buffer.from(a[i].buffer)).toEqual(Buffer.from(b[i].buffer))
    }
    const c = new FakeEncoder(16, 43).encode(recs)
    expect(Buffer.from(a[0].buffer)).not.toEqual(Buffer.from(c[0].buffer))
  })

  it('gives different rows to different records', () => {
    const recs = records(6)
    const rows = new FakeEncoder(16, 42).encode(recs)
    expect(Buffer.from(rows[0].buffer)).not.toEqual(Buffer.from(rows[1].buffer))
  })

  it('centers each class on its own scaled axis', () => {
    const nPer = 200
    const recs: ManifestRecord[] = []
    for (let i = 0; i < nPer; i++) {
      recs.push({ path: `a${i}.png`, label: 'sd3', split: 'train' }) // class id 3
    }
    const rows = new FakeEncoder(16, 42).encode(recs)
    const mean = new Float64Array(16)
    for (const row of rows) for (let d = 0; d < 16; d++) mean[d] += row[d] / nPer
    for (let d = 0; d < 16; d++) {
      const target = d === 3 ? CLASS_MEAN_SCALE : 0
      expect(Math.abs(mean[d] - target)).toBeLessThan(0.35) // ~4.7 sigma at n=200
    }
  })

  it('export writes rows in manifest order with the labels file aligned', () => {
    const recs = records(12)
    const manifest = writeManifest(recs)
    const dir = path.dirname(manifest)
    const out = path.join(dir, 'e.tnsr')
    const labelsOut = path.join(dir, 'l.tnsr')
    const res = exportEmbeddings({
      manifest,
      seed: 42,
      imageEncoder: { kind: 'fake', options: { dim: 8 } },
      outputs: { embeddings: out, labels: labelsOut },
    })
    expect(res.records).toBe(12)
    const again = path.join(dir, 'e2.tnsr')
    exportEmbeddings({
      manifest,
      seed: 42,
      imageEncoder: { kind: 'fake', options: { dim: 8 } },
      outputs: { embeddings: again },
    })
    expect(fs.readFileSync(out)).toEqual(fs.readFileSync(again)) // bitwise-stable
  })

  it('rejects an empty manifest', () => {
    const manifest = writeManifest([])
    expect(() =>
      exportEmbeddings({ manifest, outputs: { embeddings: manifest + '.tnsr' } }),
    ).toThrow(/empty manifest/)
  })

  it('surfaces unknown encoder kinds as model load failures', () => {
    const manifest = writeManifest(records(2))
    expect(() =>
      exportEmbeddings({
        manifest,
        imageEncoder: { kind: 'clip-vit' },
        outputs: { embeddings: manifest + '.tnsr' },
      }),
    ).toThrow(/model load failure/)
  })

  it('surfaces missing encoder modules as model load failures', () => {
    const manifest = writeManifest(records(2))
    expect(() =>
      exportEmbeddings({
        manifest,
        imageEncoder: { kind: 'module', module: './no_such_module.js' },
        outputs: { embeddings: manifest + '.tnsr' },
      }),
    ).toThrow(/model load failure/)
  })
})
