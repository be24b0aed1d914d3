/**
 * Cross-component contract tests: everything written here must load
 * bit-exactly in the Python toolkit, and the weight-free encoder modes
 * must drive its full pipeline end to end.  These tests spawn the
 * installed `imgprov` CLI and `python3`.
 */

import { execFileSync } from 'child_process'
import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'

import { describe, expect, it } from 'vitest'

import { writePng } from '../src/image'
import { LABELS, ManifestRecord } from '../src/manifest'
import { exportEmbeddings, exportReconstructions } from '../src/export'
import { Dtype, readTensor, writeTensor } from '../src/tnsr'

const FIXTURES = path.join(__dirname, 'fixtures')

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), 'contract-'))
}

function writeManifest(file: string, recs: ManifestRecord[]): void {
  fs.writeFileSync(file, recs.map((r) => JSON.stringify(r)).join('\n') + '\n')
}

function python(code: string): string {
  return execFileSync('python3', ['-c', code], { encoding: 'utf-8' }).trim()
}

function imgprov(args: string[]): Record<string, unknown> {
  const out = execFileSync('imgprov', args, { encoding: 'utf-8' }).trim()
  const lines = out.split('\n')
  return JSON.parse(lines[lines.length - 1]) as Record<string, unknown>
}

function randomPixels(side: number, seed: number): Float32Array {
  let state = seed >>> 0
  const pixels = new Float32Array(side * side * 3)
  for (let i = 0; i < pixels.length; i++) {
    state = (state * 1664525 + 1013904223) >>> 0
    pixels[i] = Math.fround(((state >>> 8) % 256) / 255)
  }
  return pixels
}

describe('TNSR interop with the Python toolkit', () => {
  it('tensors written here reload bit-exactly over there', () => {
    const dir = tmpdir()
    const file = path.join(dir, 'x.tnsr')
    const copy = path.join(dir, 'copy.tnsr')
    writeTensor(
      {
        dtype: Dtype.F32,
        shape: [3, 4],
        data: new Float32Array([0.1, -2.5, 1e-8, 3e8, 0, -0, 1, 2, 3, 4, 5.5, -6.25]),
      },
      file,
    )
    python(
      `from imgprov.tensorstore import read_tensor, write_tensor\n` +
        `write_tensor(read_tensor(${JSON.stringify(file)}), ${JSON.stringify(copy)})`,
    )
    expect(fs.readFileSync(copy)).toEqual(fs.readFileSync(file))

    const u8 = path.join(dir, 'u.tnsr')
    const u8copy = path.join(dir, 'ucopy.tnsr')
    writeTensor({ dtype: Dtype.U8, shape: [5], data: new Uint8Array([0, 1, 2, 254, 255]) }, u8)
    python(
      `from imgprov.tensorstore import read_tensor, write_tensor\n` +
        `write_tensor(read_tensor(${JSON.stringify(u8)}), ${JSON.stringify(u8copy)})`,
    )
    expect(fs.readFileSync(u8copy)).toEqual(fs.readFileSync(u8))
  })
})

describe('identity autoencoder end to end', () => {
  it('produces an all-zero error channel through the Python feature stack', () => {
    const dir = tmpdir()
    const recs: ManifestRecord[] = []
    for (let i = 0; i < 2; i++) {
      const img = { width: 512, height: 512, pixels: randomPixels(512, 100 + i) }
      writePng(path.join(dir, `img${i}.png`), img)
      recs.push({ path: `img${i}.png`, label: i === 0 ? 'real' : 'sdxl', split: 'train' })
    }
    const manifest = path.join(dir, 'm.jsonl')
    writeManifest(manifest, recs)

    const recons = path.join(dir, 'recons.tnsr')
    const res = exportReconstructions({
      manifest,
      autoencoder: { kind: 'identity' },
      outputs: { reconstructions: recons },
    })
    expect(res.records).toBe(2)

    const stacks = path.join(dir, 'stacks.tnsr')
    const summary = imgprov([
      'extract', '--manifest', manifest, '--recon', recons, '--out', stacks,
    ])
    expect(summary.records).toBe(2)

    const t = readTensor(stacks)
    expect(t.shape).toEqual([2, 512, 512, 5])
    const data = t.data as Float32Array
    // channel 3 is the reconstruction error: identical decode + identity
    // reconstruction leaves it exactly zero everywhere
    for (let n = 0; n < 2; n++) {
      for (let p = 0; p < 512 * 512; p++) {
        const v = data[(n * 512 * 512 + p) * 5 + 3]
        if (v !== 0) {
          throw new Error(`nonzero error channel at image ${n}, pixel ${p}: ${v}`)
        }
      }
    }
  }, 120_000)

  it('distance files from a module autoencoder feed the Python KDE directly', () => {
    const dir = tmpdir()
    const recs: ManifestRecord[] = []
    for (let i = 0; i < 4; i++) {
      const img = { width: 64, height: 64, pixels: randomPixels(64, 500 + i) }
      writePng(path.join(dir, `img${i}.png`), img)
      recs.push({ path: `img${i}.png`, label: 'dalle', split: 'train' })
    }
    const manifest = path.join(dir, 'm.jsonl')
    writeManifest(manifest, recs)

    const distances = path.join(dir, 'd.tnsr')
    exportReconstructions({
      manifest,
      autoencoder: {
        kind: 'module',
        module: path.join(FIXTURES, 'dim_autoencoder.js'),
        options: { factor: 0.9 },
      },
      outputs: { distances },
    })
    const verdict = python(
      `from imgprov.decision import kde_fit\n` +
        `from imgprov.tensorstore import read_tensor\n` +
        `scores = read_tensor(${JSON.stringify(distances)})\n` +
        `model = kde_fit(scores)\n` +
        `print(scores.shape, model.bandwidth > 0)`,
    )
    expect(verdict).toContain('(4,) True')
  }, 120_000)
})

describe('fake mode drives the full synthetic experiment', () => {
  it('reaches held-out accuracy and macro-F1 >= 0.95 through grid search', () => {
    const dir = tmpdir()
    const train: ManifestRecord[] = []
    const test: ManifestRecord[] = []
    for (const label of LABELS) {
      for (let i = 0; i < 100; i++) {
        const rec: ManifestRecord = {
          path: `${label}_${i}.png`,
          label,
          split: i < 80 ? 'train' : 'test',
        }
        ;(i < 80 ? train : test).push(rec)
      }
    }
    const trainManifest = path.join(dir, 'train.jsonl')
    const testManifest = path.join(dir, 'test.jsonl')
    writeManifest(trainManifest, train)
    writeManifest(testManifest, test)

    const paths = {
      trainEmb: path.join(dir, 'train.tnsr'),
      trainLab: path.join(dir, 'train_labels.tnsr'),
      testEmb: path.join(dir, 'test.tnsr'),
      testLab: path.join(dir, 'test_labels.tnsr'),
    }
    exportEmbeddings({
      manifest: trainManifest,
      seed: 42,
      imageEncoder: { kind: 'fake', options: { dim: 16 } },
      outputs: { embeddings: paths.trainEmb, labels: paths.trainLab },
    })
    exportEmbeddings({
      manifest: testManifest,
      seed: 42,
      imageEncoder: { kind: 'fake', options: { dim: 16 } },
      outputs: { embeddings: paths.testEmb, labels: paths.testLab },
    })

    const search = imgprov([
      'grid-search', '--embeddings', paths.trainEmb, '--labels', paths.trainLab,
      '--task', 'b', '--folds', '3',
    ])
    const bestC = String(search.best_c)
    const bestGamma = String(search.best_gamma)

    const modelDir = path.join(dir, 'model')
    imgprov([
      'train-svm', '--embeddings', paths.trainEmb, '--labels', paths.trainLab,
      '--task', 'b', '--c', bestC, '--gamma', bestGamma, '--out', modelDir,
    ])
    const pred = path.join(dir, 'pred.tnsr')
    imgprov(['predict', '--model', modelDir, '--input', paths.testEmb, '--out', pred])
    const metricsFile = path.join(dir, 'metrics.json')
    const summary = imgprov([
      'eval', '--truth', paths.testLab, '--pred', pred,
      '--classes', '6', '--task', 'b', '--out', metricsFile,
    ])
    expect(Number(summary.accuracy)).toBeGreaterThanOrEqual(0.95)
    expect(Number(summary.macro_f1)).toBeGreaterThanOrEqual(0.95)
  }, 420_000)
})

describe('exporter CLI binary', () => {
  it('runs an identity reconstruction job from flags', () => {
    const cliPath = path.join(__dirname, '..', 'dist', 'cli.js')
    const dir = tmpdir()
    const img = { width: 512, height: 512, pixels: randomPixels(512, 7) }
    writePng(path.join(dir, 'a.png'), img)
    const manifest = path.join(dir, 'm.jsonl')
    writeManifest(manifest, [{ path: 'a.png', label: 'real', split: 'train' }])
    const recons = path.join(dir, 'r.tnsr')
    const labels = path.join(dir, 'l.tnsr')
    const out = execFileSync(
      'node',
      [cliPath, '--manifest', manifest, '--identity-recons',
       '--out-recons', recons, '--out-distances', path.join(dir, 'd.tnsr'),
       '--out-labels', labels],
      { encoding: 'utf-8' },
    ).trim()
    const summary = JSON.parse(out.split('\n').pop()!) as Record<string, unknown>
    expect(summary.records).toBe(1)
    const t = readTensor(recons)
    expect(t.shape).toEqual([1, 512, 512, 3])
    expect(Array.from(readTensor(labels).data as Uint8Array)).toEqual([0])
  }, 60_000)
})
