// Toy autoencoder module for the hook path: darkens every pixel, so the
// reconstruction error and distance files are nonzero and vary by image.
module.exports = {
  createAutoencoder(options) {
    const factor = typeof options.factor === 'number' ? options.factor : 0.9
    return {
      reconstruct(img) {
        const pixels = new Float32Array(img.pixels.length)
        for (let i = 0; i < pixels.length; i++) {
          pixels[i] = Math.fround(img.pixels[i] * factor)
        }
        return { width: img.width, height: img.height, pixels }
      },
    }
  },
}
