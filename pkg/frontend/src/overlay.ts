// Geometry between normalized scene coordinates and displayed pixels.
// Pure functions so the 1-pixel overlay invariant is testable headlessly.

export interface PixelBox {
  left: number;
  top: number;
  width: number;
  height: number;
}

export function overlayBox(
  bbox: [number, number, number, number],
  displayWidth: number,
  displayHeight: number,
): PixelBox {
  const [x, y, w, h] = bbox;
  return {
    left: x * displayWidth,
    top: y * displayHeight,
    width: w * displayWidth,
    height: h * displayHeight,
  };
}

const clamp01 = (v: number) => Math.min(1, Math.max(0, v));

/** Pointer position inside a rect, as normalized image-plane coordinates. */
export function pointToNormalized(
  clientX: number,
  clientY: number,
  rect: { left: number; top: number; width: number; height: number },
): { x: number; z: number } {
  if (rect.width <= 0 || rect.height <= 0) {
    return { x: 0, z: 0 };
  }
  return {
    x: clamp01((clientX - rect.left) / rect.width),
    z: clamp01((clientY - rect.top) / rect.height),
  };
}
