/**
 * Figure renderers.  Each consumes the simulator's documented text tables
 * and produces a standalone SVG; inputs are never modified.  Heatmaps use a
 * log color scale spanning six decades below the maximum, matching how the
 * spectral-density maps are usually displayed.
 */

import { existsSync } from 'fs';
import { join } from 'path';
import {
  DetuningMap, SchemaError, numericColumns, readDetuningMap, readSpectrum,
  readTable,
} from './tables.js';
import {
  Svg, fmt, heatColor, linearScale, logScale, logTicks, ticks,
} from './svg.js';

export const FIGURE_IDS = ['fig1', 'fig2', 'fig3', 'fig4', 'fig5', 'fig6'];

const W = 760;
const H = 520;
const M = { left: 70, right: 90, top: 40, bottom: 55 };

function frame(svg: Svg, title: string, xlabel: string, ylabel: string): void {
  svg.text(W / 2, 20, title, 13, 'middle');
  svg.text(W / 2, H - 12, xlabel, 12, 'middle');
  svg.text(16, H / 2, ylabel, 12, 'middle', -90);
  svg.line(M.left, M.top, M.left, H - M.bottom, 'black');
  svg.line(M.left, H - M.bottom, W - M.right, H - M.bottom, 'black');
}

function xAxis(svg: Svg, values: number[], scale: (v: number) => number,
               decimals = 1): void {
  for (const v of values) {
    const x = scale(v);
    svg.line(x, H - M.bottom, x, H - M.bottom + 4, 'black');
    svg.text(x, H - M.bottom + 16, v.toFixed(decimals), 10, 'middle');
  }
}

function yAxis(svg: Svg, values: number[], scale: (v: number) => number,
               label: (v: number) => string): void {
  for (const v of values) {
    const y = scale(v);
    svg.line(M.left - 4, y, M.left, y, 'black');
    svg.text(M.left - 7, y + 3, label(v), 10, 'end');
  }
}

function sci(v: number): string {
  const e = Math.floor(Math.log10(Math.abs(v)));
  return `1e${e}`;
}

// --- heatmaps (fig2, fig3) --------------------------------------------------

function renderHeatmap(map: DetuningMap, title: string): string {
  const svg = new Svg(W, H);
  frame(svg, title, 'cavity-atom detuning (MHz)', 'frequency offset (MHz)');
  const nx = map.detunings.length;
  const ny = map.freq.length;
  const plotW = W - M.left - M.right;
  const plotH = H - M.top - M.bottom;
  const cellW = plotW / nx;
  const cellH = plotH / ny;

  let pmax = -Infinity;
  for (const row of map.psd) for (const v of row) pmax = Math.max(pmax, v);
  if (!(pmax > 0)) throw new SchemaError('heatmap: no positive spectral data');
  const floor = pmax * 1e-6;   // six decades of log color range

  for (let i = 0; i < nx; i++) {
    for (let j = 0; j < ny; j++) {
      const v = Math.max(map.psd[i][j], floor);
      const t = Math.log10(v / floor) / 6;
      // y axis ascending: freq[0] at the bottom.
      svg.rect(M.left + i * cellW, H - M.bottom - (j + 1) * cellH,
               cellW + 0.5, cellH + 0.5, heatColor(t));
    }
  }
  xAxis(svg, map.detunings, linearScale(
    map.detunings[0], map.detunings[nx - 1],
    M.left + cellW / 2, W - M.right - cellW / 2), 0);
  const fMHz = map.freq.map(f => f / 1e6);
  yAxis(svg, ticks(fMHz[0], fMHz[ny - 1], 7),
        linearScale(fMHz[0], fMHz[ny - 1], H - M.bottom - cellH / 2,
                    M.top + cellH / 2),
        v => v.toFixed(1));

  // Color bar with decade labels.
  const barX = W - M.right + 25;
  const barH = plotH;
  for (let k = 0; k < 120; k++) {
    svg.rect(barX, H - M.bottom - ((k + 1) * barH) / 120, 14,
             barH / 120 + 0.5, heatColor(k / 119));
  }
  for (let d = 0; d <= 6; d += 2) {
    const y = H - M.bottom - (d / 6) * barH;
    svg.text(barX + 18, y + 3, `1e${d - 6}`, 9);
  }
  svg.text(barX + 7, M.top - 8, 'psd/max', 9, 'middle');
  return svg.render();
}

function findMapFiles(dir: string, figure: string): string[] {
  const table = readTable(join(dir, `${figure}_table.tsv`));
  void table;  // presence check only; maps carry the spectra
  const candidates: string[] = [];
  for (const tag of ['map_a', 'map_c', 'map_tau0.36', 'map_tau0.40',
                     'map_tau0.44']) {
    const p = join(dir, `${figure}_${tag}.tsv`);
    if (existsSync(p)) candidates.push(p);
  }
  if (candidates.length === 0) {
    throw new SchemaError(`no ${figure}_map_*.tsv files in ${dir}`);
  }
  return candidates;
}

// --- fig1: pulling coefficient digest ---------------------------------------

function renderFig1(dir: string): string {
  const cols = numericColumns(readTable(join(dir, 'fig1_pulling.tsv')),
    ['n_tau_gamma_c', 'pulling_p_kappa_tau'], 'fig1_pulling.tsv');
  const x = cols['n_tau_gamma_c'];
  const y = cols['pulling_p_kappa_tau'];
  const svg = new Svg(W, H);
  frame(svg, 'normalized pulling coefficient vs collective emission events',
        'N tau Gamma_c', 'P kappa tau');
  const sx = logScale(Math.min(...x), Math.max(...x), M.left + 20,
                      W - M.right - 20);
  const lo = Math.min(...y, 0);
  const hi = Math.max(...y) * 1.1 || 1;
  const sy = linearScale(lo, hi, H - M.bottom - 10, M.top + 10);
  xAxis(svg, logTicks(Math.min(...x), Math.max(...x)), sx, 0);
  yAxis(svg, ticks(lo, hi, 6), sy, v => v.toPrecision(2));
  svg.line(M.left, sy(0), W - M.right, sy(0), '#999', 1, '4 3');
  const pts = x.map((v, i) => [sx(v), sy(y[i])] as [number, number]);
  svg.polyline(pts, '#1f77b4');
  for (const [px, py] of pts) svg.circle(px, py, 3.5, '#1f77b4');
  return svg.render();
}

// --- fig4: linewidth cross sections ------------------------------------------

function renderFig4(dir: string): string {
  const path = join(dir, 'fig4_table.tsv');
  const cols = numericColumns(readTable(path),
    ['pulse_area_pi', 'n_mean', 'central_fwhm_hz'], path);
  const areas = [...new Set(cols['pulse_area_pi'])].sort((a, b) => a - b);
  const svg = new Svg(W, H);
  frame(svg, 'central-peak linewidth vs atom number',
        'mean atom number N', 'linewidth (MHz)');
  const widths = cols['central_fwhm_hz'].filter(v => v > 0);
  if (widths.length === 0) throw new SchemaError(`${path}: no linewidths`);
  const ns = cols['n_mean'];
  const sx = logScale(Math.min(...ns), Math.max(...ns), M.left + 20,
                      W - M.right - 20);
  const loMHz = Math.min(...widths) / 1e6 / 2;
  const hiMHz = Math.max(...widths) / 1e6 * 2;
  const sy = logScale(loMHz, hiMHz, H - M.bottom - 10, M.top + 10);
  xAxis(svg, logTicks(Math.min(...ns), Math.max(...ns)), sx, 0);
  yAxis(svg, logTicks(loMHz, hiMHz), sy, sci);
  const palette = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#8c564b',
                   '#e377c2'];
  areas.forEach((area, k) => {
    const pts: Array<[number, number]> = [];
    for (let i = 0; i < ns.length; i++) {
      if (cols['pulse_area_pi'][i] === area && cols['central_fwhm_hz'][i] > 0) {
        pts.push([ns[i], cols['central_fwhm_hz'][i] / 1e6]);
      }
    }
    pts.sort((a, b) => a[0] - b[0]);
    const path2 = pts.map(([n, w]) => [sx(n), sy(w)] as [number, number]);
    svg.polyline(path2, palette[k % palette.length]);
    for (const [px, py] of path2) {
      svg.circle(px, py, 3, palette[k % palette.length]);
    }
    svg.text(W - M.right - 4, M.top + 14 + 14 * k,
             `area ${fmt(area)} pi`, 10, 'end');
    svg.line(W - M.right - 80, M.top + 10 + 14 * k, W - M.right - 60,
             M.top + 10 + 14 * k, palette[k % palette.length], 2);
  });
  return svg.render();
}

// --- fig5: linewidth vs photon number ----------------------------------------

function renderFig5(dir: string): string {
  const path = join(dir, 'fig5_table.tsv');
  const cols = numericColumns(readTable(path),
    ['pulse_area_pi', 'photon_number_central', 'central_fwhm_hz'], path);
  const pts: Array<[number, number, number]> = [];
  for (let i = 0; i < cols['central_fwhm_hz'].length; i++) {
    const n = cols['photon_number_central'][i];
    const w = cols['central_fwhm_hz'][i];
    if (n > 0 && w > 0) pts.push([n, w, cols['pulse_area_pi'][i]]);
  }
  if (pts.length === 0) throw new SchemaError(`${path}: no usable points`);
  const svg = new Svg(W, H);
  frame(svg, 'central-peak linewidth vs central photon number',
        'mean photon number (central peak)', 'linewidth (Hz)');
  const xs = pts.map(p => p[0]);
  const ys = pts.map(p => p[1]);
  const sx = logScale(Math.min(...xs) / 1.5, Math.max(...xs) * 1.5,
                      M.left + 15, W - M.right - 15);
  const sy = logScale(Math.min(...ys) / 1.5, Math.max(...ys) * 1.5,
                      H - M.bottom - 10, M.top + 10);
  xAxis(svg, logTicks(sx.domain[0], sx.domain[1]), sx, 2);
  yAxis(svg, logTicks(sy.domain[0], sy.domain[1]), sy, sci);

  // Reference guide with slope -1 through the data median.
  const mx = xs[Math.floor(xs.length / 2)];
  const my = ys[Math.floor(ys.length / 2)];
  const g0 = sx.domain[0] * 1.2;
  const g1 = sx.domain[1] / 1.2;
  svg.line(sx(g0), sy(my * (mx / g0)), sx(g1), sy(my * (mx / g1)),
           '#999', 1, '5 4');
  svg.text(sx(g1), sy(my * (mx / g1)) - 6, 'slope -1', 9, 'end');

  const palette = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd'];
  const areas = [...new Set(pts.map(p => p[2]))].sort((a, b) => a - b);
  for (const [n, w, area] of pts) {
    svg.circle(sx(n), sy(w), 3.5, palette[areas.indexOf(area) % 4]);
  }
  areas.forEach((area, k) => {
    svg.circle(W - M.right - 76, M.top + 10 + 14 * k, 3.5, palette[k % 4]);
    svg.text(W - M.right - 68, M.top + 14 + 14 * k, `area ${fmt(area)} pi`,
             10);
  });
  return svg.render();
}

// --- fig6: contrast line + sample spectrum ------------------------------------

function renderFig6(dir: string): string {
  const tablePath = join(dir, 'fig6_table.tsv');
  const cols = numericColumns(readTable(tablePath),
    ['delta_offset_mhz', 'contrast'], tablePath);
  const spec = readSpectrum(join(dir, 'fig6_spectrum.tsv'));

  const svg = new Svg(W, H);
  svg.text(W / 2, 20, 'side-peak contrast vs pump carrier detuning', 13,
           'middle');
  // Left panel: contrast line.
  const lw = W / 2 - 40;
  const sx = linearScale(Math.min(...cols['delta_offset_mhz']),
                         Math.max(...cols['delta_offset_mhz']),
                         M.left, lw);
  const cLo = Math.min(...cols['contrast'], 0) - 0.01;
  const cHi = Math.max(...cols['contrast'], 0) + 0.01;
  const sy = linearScale(cLo, cHi, H - M.bottom, M.top + 20);
  svg.line(M.left, H - M.bottom, lw, H - M.bottom, 'black');
  svg.line(M.left, M.top + 20, M.left, H - M.bottom, 'black');
  svg.line(M.left, sy(0), lw, sy(0), '#999', 1, '4 3');
  for (const v of ticks(cLo, cHi, 5)) {
    svg.line(M.left - 4, sy(v), M.left, sy(v), 'black');
    svg.text(M.left - 7, sy(v) + 3, v.toFixed(2), 9, 'end');
  }
  for (const v of cols['delta_offset_mhz']) {
    svg.line(sx(v), H - M.bottom, sx(v), H - M.bottom + 4, 'black');
    svg.text(sx(v), H - M.bottom + 15, v.toFixed(3), 9, 'middle');
  }
  const order = cols['delta_offset_mhz']
    .map((v, i) => [v, cols['contrast'][i]] as [number, number])
    .sort((a, b) => a[0] - b[0]);
  svg.polyline(order.map(([v, c]) => [sx(v), sy(c)]), '#d62728');
  for (const [v, c] of order) svg.circle(sx(v), sy(c), 3.5, '#d62728');
  svg.text((M.left + lw) / 2, H - 12, 'carrier detuning (MHz)', 11, 'middle');
  svg.text(20, H / 2, 'contrast', 11, 'middle', -90);

  // Right panel: sample spectrum on a log scale.
  const rx0 = W / 2 + 40;
  const rx1 = W - 30;
  const pmax = Math.max(...spec.psd);
  if (!(pmax > 0)) throw new SchemaError('fig6_spectrum.tsv: no signal');
  const floor = pmax * 1e-8;
  const sfx = linearScale(spec.freq[0] / 1e6,
                          spec.freq[spec.freq.length - 1] / 1e6, rx0, rx1);
  const sfy = logScale(floor, pmax, H - M.bottom, M.top + 20);
  svg.line(rx0, H - M.bottom, rx1, H - M.bottom, 'black');
  svg.line(rx0, M.top + 20, rx0, H - M.bottom, 'black');
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < spec.freq.length; i++) {
    pts.push([sfx(spec.freq[i] / 1e6), sfy(Math.max(spec.psd[i], floor))]);
  }
  svg.polyline(pts, '#1f77b4', 0.8);
  for (const v of ticks(spec.freq[0] / 1e6, spec.freq[spec.freq.length - 1] / 1e6, 7)) {
    svg.line(sfx(v), H - M.bottom, sfx(v), H - M.bottom + 4, 'black');
    svg.text(sfx(v), H - M.bottom + 15, v.toFixed(1), 9, 'middle');
  }
  svg.text((rx0 + rx1) / 2, H - 12, 'frequency offset (MHz)', 11, 'middle');
  return svg.render();
}

// --- dispatch -----------------------------------------------------------------

export function renderFigure(figure: string, dir: string,
                             variant = 0): string {
  switch (figure) {
    case 'fig1':
      return renderFig1(dir);
    case 'fig2':
    case 'fig3': {
      const maps = findMapFiles(dir, figure);
      const path = maps[Math.min(variant, maps.length - 1)];
      const name = path.split('/').pop()!;
      return renderHeatmap(readDetuningMap(path),
                           `power spectral density map (${name})`);
    }
    case 'fig4':
      return renderFig4(dir);
    case 'fig5':
      return renderFig5(dir);
    case 'fig6':
      return renderFig6(dir);
    default:
      throw new SchemaError(
        `unknown figure id '${figure}'; expected ${FIGURE_IDS.join(', ')}`);
  }
}
