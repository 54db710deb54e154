// CLI: render every figure a pipeline export supports.
//
//   node dist/index.js --in results/ --out figures/
//
// Reads topologies.csv, memberships_m*.csv and summary.json; writes SVG
// files (scalp grids embed deterministic PNG rasters, so identical inputs
// produce identical bytes).

import * as fs from 'node:fs';
import * as path from 'node:path';

import { renderAccuracyChart } from './accuracy.js';
import { renderMembershipBars } from './bars.js';
import { parseMemberships, parseSummary, parseTopologies } from './csv.js';
import { renderTopomapBatch } from './topomap.js';

export interface RenderResult {
    written: string[];
}

export function renderExport(inDir: string, outDir: string): RenderResult {
    fs.mkdirSync(outDir, { recursive: true });
    const written: string[] = [];

    const topoPath = path.join(inDir, 'topologies.csv');
    if (fs.existsSync(topoPath)) {
        const table = parseTopologies(fs.readFileSync(topoPath, 'utf-8'));
        const svg = renderTopomapBatch(table);
        const target = path.join(outDir, 'topomap_batch.svg');
        fs.writeFileSync(target, svg);
        written.push(target);
    }

    const entries = fs
        .readdirSync(inDir)
        .filter((name) => /^memberships_m.*\.csv$/.test(name))
        .sort();
    for (const name of entries) {
        const table = parseMemberships(fs.readFileSync(path.join(inDir, name), 'utf-8'));
        const svg = renderMembershipBars(table);
        const target = path.join(outDir, name.replace(/\.csv$/, '.svg'));
        fs.writeFileSync(target, svg);
        written.push(target);
    }

    const summaryPath = path.join(inDir, 'summary.json');
    if (fs.existsSync(summaryPath)) {
        const summary = parseSummary(fs.readFileSync(summaryPath, 'utf-8'));
        const svg = renderAccuracyChart(
            summary.perM,
            `accuracy vs m (${summary.method}, ${summary.band})`,
        );
        if (svg !== null) {
            const target = path.join(outDir, 'accuracy_vs_m.svg');
            fs.writeFileSync(target, svg);
            written.push(target);
        }
    }

    if (written.length === 0) {
        throw new Error(`no renderable exports found in ${inDir}`);
    }
    return { written };
}

export function main(argv: string[]): number {
    let inDir: string | null = null;
    let outDir: string | null = null;
    for (let i = 0; i < argv.length; i++) {
        if (argv[i] === '--in') inDir = argv[++i];
        else if (argv[i] === '--out') outDir = argv[++i];
        else {
            console.error(`unknown argument: ${argv[i]}`);
            return 2;
        }
    }
    if (!inDir || !outDir) {
        console.error('usage: index.js --in <export dir> --out <figure dir>');
        return 2;
    }
    try {
        const result = renderExport(inDir, outDir);
        for (const file of result.written) console.log(`wrote ${file}`);
        return 0;
    } catch (err) {
        console.error(String(err));
        return 1;
    }
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('index.js') || entry.endsWith('index.ts')) {
    process.exit(main(process.argv.slice(2)));
}
