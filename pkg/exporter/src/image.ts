/**
 * PNG / baseline-JPEG decoding and bilinear standardization to the
 * toolkit's 512x512x3 float32 [0,1] layout.  For sources already at
 * 512x512 the pixels pass through exactly (resize is the identity), so
 * identity reconstructions agree bit-for-bit with the consumer's decoder.
 */

import * as fs from 'fs'
import * as jpeg from 'jpeg-js'
import { PNG } from 'pngjs'

export const SIDE = 512

export interface RgbImage {
  width: number
  height: number
  /** Row-major RGB float32 in [0,1], length width*height*3. */
  pixels: Float32Array
}

function fromRgbaBytes(data: Uint8Array, width: number, height: number): RgbImage {
  const pixels = new Float32Array(width * height * 3)
  for (let i = 0, j = 0; i < width * height; i++, j += 4) {
    pixels[3 * i] = Math.fround(data[j] / 255)
    pixels[3 * i + 1] = Math.fround(data[j + 1] / 255)
    pixels[3 * i + 2] = Math.fround(data[j + 2] / 255)
  }
  return { width, height, pixels }
}

export function decodeImage(bytes: Buffer): RgbImage {
  if (bytes.length >= 8 && bytes.readUInt32BE(0) === 0x89504e47) {
    const png = PNG.sync.read(bytes)
    if (png.width === 0 || png.height === 0) throw new Error('image has a zero dimension')
    return fromRgbaBytes(png.data, png.width, png.height)
  }
  if (bytes.length >= 2 && bytes[0] === 0xff && bytes[1] === 0xd8) {
    const out = jpeg.decode(bytes, { useTArray: true, formatAsRGBA: true })
    if (out.width === 0 || out.height === 0) throw new Error('image has a zero dimension')
    return fromRgbaBytes(out.data, out.width, out.height)
  }
  throw new Error('cannot decode image bytes: not PNG or JPEG')
}

/** Plain bilinear resize (half-pixel centers, edge clamped). */
export function resizeBilinear(img: RgbImage, outSide: number): RgbImage {
  if (img.width === outSide && img.height === outSide) {
    return { width: outSide, height: outSide, pixels: img.pixels.slice() }
  }
  const out = new Float32Array(outSide * outSide * 3)
  const sx = img.width / outSide
  const sy = img.height / outSide
  for (let y = 0; y < outSide; y++) {
    const srcY = Math.min(Math.max((y + 0.5) * sy - 0.5, 0), img.height - 1)
    const y0 = Math.floor(srcY)
    const y1 = Math.min(y0 + 1, img.height - 1)
    const fy = srcY - y0
    for (let x = 0; x < outSide; x++) {
      const srcX = Math.min(Math.max((x + 0.5) * sx - 0.5, 0), img.width - 1)
      const x0 = Math.floor(srcX)
      const x1 = Math.min(x0 + 1, img.width - 1)
      const fx = srcX - x0
      for (let c = 0; c < 3; c++) {
        const p00 = img.pixels[3 * (y0 * img.width + x0) + c]
        const p01 = img.pixels[3 * (y0 * img.width + x1) + c]
        const p10 = img.pixels[3 * (y1 * img.width + x0) + c]
        const p11 = img.pixels[3 * (y1 * img.width + x1) + c]
        const top = p00 + (p01 - p00) * fx
        const bot = p10 + (p11 - p10) * fx
        out[3 * (y * outSide + x) + c] = Math.fround(top + (bot - top) * fy)
      }
    }
  }
  return { width: outSide, height: outSide, pixels: out }
}

export function loadStandardized(path: string): RgbImage {
  return resizeBilinear(decodeImage(fs.readFileSync(path)), SIDE)
}

export function writePng(path: string, img: RgbImage): void {
  const png = new PNG({ width: img.width, height: img.height })
  for (let i = 0; i < img.width * img.height; i++) {
    png.data[4 * i] = Math.round(img.pixels[3 * i] * 255)
    png.data[4 * i + 1] = Math.round(img.pixels[3 * i + 1] * 255)
    png.data[4 * i + 2] = Math.round(img.pixels[3 * i + 2] * 255)
    png.data[4 * i + 3] = 255
  }
  fs.writeFileSync(path, PNG.sync.write(png))
}
