// Parsers for the pipeline's exported CSV schemas.

export interface ParsedCsv {
    comments: string[];
    header: string[];
    rows: string[][];
}

export function parseCsv(text: string): ParsedCsv {
    const comments: string[] = [];
    let header: string[] | null = null;
    const rows: string[][] = [];
    for (const rawLine of text.split(/\r?\n/)) {
        const line = rawLine.trim();
        if (!line) continue;
        if (line.startsWith('#')) {
            comments.push(line);
            continue;
        }
        const cells = line.split(',').map((c) => c.trim());
        if (header === null) {
            header = cells;
        } else {
            rows.push(cells);
        }
    }
    if (header === null) throw new Error('CSV has no header row');
    return { comments, header, rows };
}

export interface TopologyTable {
    subjects: string[];
    channels: string[];
    values: number[][];
}

export function parseTopologies(text: string): TopologyTable {
    const { header, rows } = parseCsv(text);
    if (header[0] !== 'subject_id') {
        throw new Error(`topologies CSV must start with subject_id, got ${header[0]}`);
    }
    const channels = header.slice(1);
    const subjects: string[] = [];
    const values: number[][] = [];
    for (const row of rows) {
        if (row.length !== header.length) {
            throw new Error(`row for ${row[0]} has ${row.length} cells, expected ${header.length}`);
        }
        subjects.push(row[0]);
        const weights = row.slice(1).map(Number);
        if (weights.some((w) => !Number.isFinite(w))) {
            throw new Error(`non-numeric weight in row for ${row[0]}`);
        }
        values.push(weights);
    }
    return { subjects, channels, values };
}

export interface MembershipTable {
    subjects: string[];
    memberships: number[][];
    hardLabels: number[];
    fuzzyFlags: boolean[];
}

export function parseMemberships(text: string): MembershipTable {
    const { header, rows } = parseCsv(text);
    if (header[0] !== 'subject_id') {
        throw new Error('membership CSV must start with a subject_id column');
    }
    const uColumns: number[] = [];
    for (let s = 1; ; s++) {
        const idx = header.indexOf(`u_${s}`);
        if (idx < 0) break;
        uColumns.push(idx);
    }
    if (uColumns.length < 2) {
        throw new Error('membership CSV needs columns u_1..u_S with S >= 2');
    }
    const labelIdx = header.indexOf('hard_label');
    const flagIdx = header.indexOf('fuzzy_flag');
    const subjects: string[] = [];
    const memberships: number[][] = [];
    const hardLabels: number[] = [];
    const fuzzyFlags: boolean[] = [];
    for (const row of rows) {
        subjects.push(row[0]);
        const u = uColumns.map((i) => Number(row[i]));
        if (u.some((v) => !Number.isFinite(v) || v < 0 || v > 1)) {
            throw new Error(`invalid membership value in row for ${row[0]}`);
        }
        const total = u.reduce((a, b) => a + b, 0);
        if (Math.abs(total - 1) > 1e-6) {
            throw new Error(
                `memberships for ${row[0]} sum to ${total}; expected 1 within 1e-6`,
            );
        }
        memberships.push(u);
        hardLabels.push(labelIdx >= 0 ? Number(row[labelIdx]) : u.indexOf(Math.max(...u)) + 1);
        fuzzyFlags.push(flagIdx >= 0 ? row[flagIdx] === 'true' : false);
    }
    return { subjects, memberships, hardLabels, fuzzyFlags };
}

export interface SummaryPerM {
    m: number;
    accuracy: number | null;
}

export function parseSummary(text: string): { perM: SummaryPerM[]; method: string; band: string } {
    const data = JSON.parse(text);
    const perM = (data.per_m ?? []).map((entry: { m: number; accuracy: number | null }) => ({
        m: entry.m,
        accuracy: entry.accuracy ?? null,
    }));
    return { perM, method: String(data.method ?? ''), band: String(data.band ?? '') };
}
