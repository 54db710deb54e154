import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';

import { afterAll, describe, expect, it } from 'vitest';

import { main, renderExport } from '../src/index.js';

const here = path.dirname(fileURLToPath(import.meta.url));
const exportDir = path.join(here, 'fixtures', 'export');
const scratch = fs.mkdtempSync(path.join(os.tmpdir(), 'viz-'));

afterAll(() => {
    fs.rmSync(scratch, { recursive: true, force: true });
});

describe('render CLI', () => {
    it('renders every figure from a pipeline export without error', () => {
        const out = path.join(scratch, 'figs');
        const result = renderExport(exportDir, out);
        const names = result.written.map((p) => path.basename(p)).sort();
        expect(names).toEqual([
            'accuracy_vs_m.svg',
            'memberships_m1.2.svg',
            'memberships_m2.svg',
            'topomap_batch.svg',
        ]);
        for (const file of result.written) {
            expect(fs.statSync(file).size).toBeGreaterThan(0);
        }
    });

    it('produces byte-identical outputs across two runs', () => {
        const outA = path.join(scratch, 'a');
        const outB = path.join(scratch, 'b');
        renderExport(exportDir, outA);
        renderExport(exportDir, outB);
        for (const name of fs.readdirSync(outA)) {
            const a = fs.readFileSync(path.join(outA, name));
            const b = fs.readFileSync(path.join(outB, name));
            expect(a.equals(b)).toBe(true);
        }
    });

    it('exits nonzero on bad arguments and empty inputs', () => {
        expect(main(['--bogus'])).toBe(2);
        expect(main([])).toBe(2);
        const emptyDir = path.join(scratch, 'empty');
        fs.mkdirSync(emptyDir, { recursive: true });
        expect(main(['--in', emptyDir, '--out', path.join(scratch, 'x')])).toBe(1);
    });
});
