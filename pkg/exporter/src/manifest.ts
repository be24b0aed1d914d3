/** JSON-Lines dataset manifests shared with the consumer toolkit. */

import * as fs from 'fs'

export const LABELS = ['real', 'sd21', 'sdxl', 'sd3', 'dalle', 'midjourney'] as const
export const SPLITS = ['train', 'val', 'test'] as const

export type Label = (typeof LABELS)[number]
export type Split = (typeof SPLITS)[number]

export interface ManifestRecord {
  path: string
  label: Label
  split: Split
}

export function labelId(label: Label): number {
  return LABELS.indexOf(label)
}

export function readManifest(path: string): ManifestRecord[] {
  const text = fs.readFileSync(path, 'utf-8')
  const records: ManifestRecord[] = []
  const seen = new Set<string>()
  const lines = text.split('\n')
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim()
    if (line === '') continue
    const lineno = i + 1
    let obj: unknown
    try {
      obj = JSON.parse(line)
    } catch (err) {
      throw new Error(`${path}:${lineno}: malformed JSON (${(err as Error).message})`)
    }
    const rec = obj as Record<string, unknown>
    if (typeof rec !== 'object' || rec === null) {
      throw new Error(`${path}:${lineno}: record must be an object`)
    }
    for (const field of ['path', 'label', 'split']) {
      if (typeof rec[field] !== 'string') {
        throw new Error(`${path}:${lineno}: missing or non-string field "${field}"`)
      }
    }
    const label = rec.label as string
    if (!LABELS.includes(label as Label)) {
      throw new Error(`${path}:${lineno}: unknown label ${JSON.stringify(label)}`)
    }
    const split = rec.split as string
    if (!SPLITS.includes(split as Split)) {
      throw new Error(`${path}:${lineno}: unknown split ${JSON.stringify(split)}`)
    }
    const p = rec.path as string
    if (seen.has(p)) {
      throw new Error(`${path}:${lineno}: duplicate path ${JSON.stringify(p)}`)
    }
    seen.add(p)
    records.push({ path: p, label: label as Label, split: split as Split })
  }
  return records
}
