/**
 * Deterministic pseudo-randomness for the fake encoder: FNV-1a path
 * hashing feeding a splitmix64 stream, with Box-Muller normals.
 * Everything runs on BigInt so results are identical across platforms.
 */

const MASK64 = (1n << 64n) - 1n

export function fnv1a64(text: string): bigint {
  let hash = 0xcbf29ce484222325n
  const bytes = Buffer.from(text, 'utf-8')
  for (const b of bytes) {
    hash ^= BigInt(b)
    hash = (hash * 0x100000001b3n) & MASK64
  }
  return hash
}

export class SplitMix64 {
  private state: bigint

  constructor(seed: bigint) {
    this.state = seed & MASK64
  }

  nextU64(): bigint {
    this.state = (this.state + 0x9e3779b97f4a7c15n) & MASK64
    let z = this.state
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64
    return z ^ (z >> 31n)
  }

  /** Uniform double in (0, 1): 53 mantissa bits, never exactly 0. */
  nextUniform(): number {
    const bits = this.nextU64() >> 11n
    return (Number(bits) + 0.5) / 9007199254740992.0
  }

  /** Standard normal via Box-Muller (uses two uniforms per pair). */
  normals(count: number): Float64Array {
    const out = new Float64Array(count)
    for (let i = 0; i < count; i += 2) {
      const u1 = this.nextUniform()
      const u2 = this.nextUniform()
      const r = Math.sqrt(-2.0 * Math.log(u1))
      out[i] = r * Math.cos(2.0 * Math.PI * u2)
      if (i + 1 < count) out[i + 1] = r * Math.sin(2.0 * Math.PI * u2)
    }
    return out
  }
}
