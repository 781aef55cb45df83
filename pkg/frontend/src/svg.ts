/**
 * Minimal deterministic SVG scene builder: fixed float formatting, no
 * timestamps, no randomness, so identical inputs give identical bytes.
 */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return '0';
  const s = x.toFixed(2);
  return s === '-0.00' ? '0.00' : s;
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
      `height="${fmt(h)}" fill="${fill}"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1, dash = ''): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : '';
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
      `y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(' ');
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
      `stroke-width="${width}"/>`);
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, size = 11,
       anchor: 'start' | 'middle' | 'end' = 'start', rotate = 0): void {
    const transform = rotate
      ? ` transform="rotate(${fmt(rotate)} ${fmt(x)} ${fmt(y)})"` : '';
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
      `font-family="Helvetica,Arial,sans-serif" text-anchor="${anchor}"` +
      `${transform}>${escapeXml(content)}</text>`);
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join('\n') + '\n</svg>\n');
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

// --- scales ---------------------------------------------------------------

export interface Scale { (v: number): number; domain: [number, number] }

export function linearScale(d0: number, d1: number, r0: number,
                            r1: number): Scale {
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = [d0, d1];
  return f;
}

export function logScale(d0: number, d1: number, r0: number,
                         r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  const f = ((v: number) =>
    r0 + ((Math.log10(v) - l0) / span) * (r1 - r0)) as Scale;
  f.domain = [d0, d1];
  return f;
}

export function ticks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const step0 = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step0;
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * (1 + 1e-9);
       e++) {
    out.push(Math.pow(10, e));
  }
  return out.length ? out : [lo];
}

/**
 * Dark-blue -> teal -> green -> yellow color ramp (perceptual, log-friendly);
 * t in [0, 1].
 */
export function heatColor(t: number): string {
  const stops: Array<[number, number, number]> = [
    [13, 8, 135], [70, 3, 159], [114, 1, 168], [156, 23, 158],
    [189, 55, 134], [216, 87, 107], [237, 121, 83], [251, 159, 58],
    [253, 202, 38], [240, 249, 33]];
  const x = Math.min(Math.max(t, 0), 1) * (stops.length - 1);
  const i = Math.min(Math.floor(x), stops.length - 2);
  const frac = x - i;
  const c = stops[i].map((v, k) => Math.round(v + frac * (stops[i + 1][k] - v)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}
