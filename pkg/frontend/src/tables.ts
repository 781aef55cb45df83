/**
 * Parsers for the simulator's text outputs.  Every table is tab-separated
 * with one header row; lines starting with '#' are comments.  Missing
 * columns are hard errors that name the offending column.
 */

import { readFileSync } from 'fs';

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: string[][];
}

export function parseTable(text: string, path = '<memory>'): Table {
  const lines = text.split('\n').filter(l => l.trim() !== '' && !l.startsWith('#'));
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty table`);
  }
  const columns = lines[0].split('\t').map(c => c.trim());
  const rows = lines.slice(1).map(l => l.split('\t'));
  if (rows.length === 0) {
    throw new SchemaError(`${path}: table has a header but no data rows`);
  }
  return { columns, rows };
}

export function readTable(path: string): Table {
  return parseTable(readFileSync(path, 'utf-8'), path);
}

/** Extract named numeric columns; unknown names raise SchemaError. */
export function numericColumns(table: Table, names: string[], path = '<table>'):
    Record<string, number[]> {
  const out: Record<string, number[]> = {};
  for (const name of names) {
    const idx = table.columns.indexOf(name);
    if (idx < 0) {
      throw new SchemaError(
        `${path}: missing required column '${name}' ` +
        `(found: ${table.columns.join(', ')})`);
    }
    out[name] = table.rows.map((row, r) => {
      const raw = (row[idx] ?? '').trim();
      const v = raw === '' ? NaN : Number(raw);
      if (raw !== '' && Number.isNaN(v)) {
        throw new SchemaError(
          `${path}: row ${r + 1}, column '${name}': not a number: '${raw}'`);
      }
      return v;
    });
  }
  return out;
}

export interface SpectrumData { freq: number[]; psd: number[] }

export function readSpectrum(path: string): SpectrumData {
  const cols = numericColumns(readTable(path), ['freq_hz', 'psd'], path);
  return { freq: cols['freq_hz'], psd: cols['psd'] };
}

export interface DetuningMap {
  detunings: number[];           // MHz, ascending
  freq: number[];                // Hz, ascending (common grid)
  psd: number[][];               // [detuning][freq]
}

/** Long-format map (delta_ca_mhz, freq_hz, psd) -> dense grid. */
export function readDetuningMap(path: string): DetuningMap {
  const cols = numericColumns(readTable(path),
    ['delta_ca_mhz', 'freq_hz', 'psd'], path);
  const byDet = new Map<number, Array<[number, number]>>();
  for (let i = 0; i < cols['psd'].length; i++) {
    const d = cols['delta_ca_mhz'][i];
    if (!byDet.has(d)) byDet.set(d, []);
    byDet.get(d)!.push([cols['freq_hz'][i], cols['psd'][i]]);
  }
  const detunings = [...byDet.keys()].sort((a, b) => a - b);
  const first = byDet.get(detunings[0])!;
  const freq = first.map(p => p[0]);
  const psd = detunings.map(d => {
    const pts = byDet.get(d)!;
    if (pts.length !== freq.length) {
      throw new SchemaError(
        `${path}: detuning ${d} MHz has ${pts.length} bins, expected ` +
        `${freq.length}`);
    }
    return pts.map(p => p[1]);
  });
  return { detunings, freq, psd };
}
