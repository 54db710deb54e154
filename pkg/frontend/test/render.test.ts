import * as fs from 'node:fs';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { parseMemberships, parseTopologies } from '../src/csv.js';
import { renderMembershipBars } from '../src/bars.js';
import { renderTopomapBatch } from '../src/topomap.js';

const here = path.dirname(fileURLToPath(import.meta.url));
const exportDir = path.join(here, 'fixtures', 'export');

function readFixture(name: string): string {
    return fs.readFileSync(path.join(exportDir, name), 'utf-8');
}

describe('topomap batch from a pipeline export', () => {
    it('renders 14 panels with one shared colorbar', () => {
        const table = parseTopologies(readFixture('topologies.csv'));
        expect(table.subjects).toHaveLength(14);
        const svg = renderTopomapBatch(table);
        expect((svg.match(/<image /g) ?? []).length).toBe(14);
        expect((svg.match(/<linearGradient /g) ?? []).length).toBe(1);
        for (const subject of table.subjects) {
            expect(svg).toContain(`>${subject}</text>`);
        }
    });

    it('is byte-stable across runs', () => {
        const table = parseTopologies(readFixture('topologies.csv'));
        const first = renderTopomapBatch(table);
        const second = renderTopomapBatch(table);
        expect(Buffer.from(first).equals(Buffer.from(second))).toBe(true);
    });

    it('rejects unknown channel labels with the known list', () => {
        const table = parseTopologies(readFixture('topologies.csv'));
        table.channels[0] = 'XX';
        expect(() => renderTopomapBatch(table)).toThrow(/known labels/);
    });
});

describe('membership bars from a pipeline export', () => {
    it('draws one group of two bars per subject', () => {
        const table = parseMemberships(readFixture('memberships_m1.2.csv'));
        expect(table.subjects).toHaveLength(14);
        const svg = renderMembershipBars(table);
        expect((svg.match(/class="membership-bar"/g) ?? []).length).toBe(28);
    });

    it('renders equal bars for a (0.5, 0.5) row', () => {
        const table = {
            subjects: ['even'],
            memberships: [[0.5, 0.5]],
            hardLabels: [1],
            fuzzyFlags: [true],
        };
        const svg = renderMembershipBars(table);
        const heights = [...svg.matchAll(/class="membership-bar"[^/]*height="([0-9.]+)"/g)]
            .map((m) => Number(m[1]));
        expect(heights).toHaveLength(2);
        expect(heights[0]).toBe(heights[1]);
    });

    it('is byte-stable across runs', () => {
        const table = parseMemberships(readFixture('memberships_m2.csv'));
        expect(renderMembershipBars(table)).toBe(renderMembershipBars(table));
    });
});
