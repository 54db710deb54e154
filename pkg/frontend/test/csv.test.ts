import { describe, expect, it } from 'vitest';

import { parseMemberships, parseTopologies } from '../src/csv.js';

describe('membership CSV parsing', () => {
    it('accepts well-formed rows', () => {
        const text = [
            'subject_id,u_1,u_2,hard_label,fuzzy_flag',
            's1,0.9,0.1,1,false',
            's2,0.5,0.5,1,true',
        ].join('\n');
        const table = parseMemberships(text);
        expect(table.subjects).toEqual(['s1', 's2']);
        expect(table.memberships[1]).toEqual([0.5, 0.5]);
        expect(table.fuzzyFlags).toEqual([false, true]);
    });

    it('rejects rows that do not sum to one', () => {
        const text = ['subject_id,u_1,u_2', 's1,0.9,0.2'].join('\n');
        expect(() => parseMemberships(text)).toThrow(/sum to/);
    });

    it('rejects a schema missing u_2', () => {
        const text = ['subject_id,u_1,hard_label', 's1,1.0,1'].join('\n');
        expect(() => parseMemberships(text)).toThrow(/u_1\.\.u_S/);
    });
});

describe('topology CSV parsing', () => {
    it('reads subjects, channels and weights', () => {
        const text = ['subject_id,F3,P4', 'a,0.5,0.25', 'b,0.1,0.9'].join('\n');
        const table = parseTopologies(text);
        expect(table.channels).toEqual(['F3', 'P4']);
        expect(table.values[1]).toEqual([0.1, 0.9]);
    });

    it('rejects non-numeric weights', () => {
        const text = ['subject_id,F3', 'a,soup'].join('\n');
        expect(() => parseTopologies(text)).toThrow(/non-numeric/);
    });
});
