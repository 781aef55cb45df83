/**
 * beamlaser-plot: render figure-style SVGs from simulator output tables.
 *
 *     beamlaser-plot <figure-id> --in <dir> --out <file.svg> [--variant k]
 *
 * <dir> must contain the tables written by `beamlaser reproduce <figure-id>`
 * (or a sweep with the same schema).  Exits 1 on schema violations, naming
 * the offending file/column; input files are never modified.
 */

import { writeFileSync } from 'fs';
import { FIGURE_IDS, renderFigure } from './figures.js';
import { SchemaError } from './tables.js';

function parseArgs(argv: string[]): { figure: string; inDir: string;
                                      outFile: string; variant: number } {
  const [figure, ...rest] = argv;
  if (!figure || !FIGURE_IDS.includes(figure)) {
    throw new SchemaError(
      `usage: beamlaser-plot <${FIGURE_IDS.join('|')}> --in DIR --out FILE`);
  }
  let inDir = '';
  let outFile = '';
  let variant = 0;
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const value = rest[i + 1];
    if (value === undefined) throw new SchemaError(`missing value for ${key}`);
    if (key === '--in') inDir = value;
    else if (key === '--out') outFile = value;
    else if (key === '--variant') variant = Number(value);
    else throw new SchemaError(`unknown option ${key}`);
  }
  if (!inDir || !outFile) {
    throw new SchemaError('both --in and --out are required');
  }
  return { figure, inDir, outFile, variant };
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const svg = renderFigure(args.figure, args.inDir, args.variant);
    writeFileSync(args.outFile, svg);
    console.log(`wrote ${args.outFile}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && 'code' in err && err.code === 'ENOENT') {
      console.error(`missing input: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exit(main(process.argv.slice(2)));
