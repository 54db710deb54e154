// Grouped membership-degree bars, one group per subject.

import { MembershipTable } from './csv.js';

const SERIES_COLORS = ['#ff7f0e', '#2ca02c', '#1f77b4', '#9467bd'];

export function renderMembershipBars(table: MembershipTable): string {
    const nSubjects = table.subjects.length;
    if (nSubjects === 0) throw new Error('membership table is empty');
    const nClusters = table.memberships[0].length;

    const barWidth = 14;
    const gap = 10;
    const groupWidth = nClusters * barWidth + gap;
    const plotHeight = 160;
    const marginLeft = 40;
    const marginTop = 20;
    const labelSpace = 46;
    const width = marginLeft + nSubjects * groupWidth + 20;
    const height = marginTop + plotHeight + labelSpace;

    const parts: string[] = [];
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}">`,
    );
    parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
    for (const tick of [0, 0.5, 0.7, 1]) {
        const y = marginTop + plotHeight * (1 - tick);
        const dash = tick === 0.7 ? ' stroke-dasharray="4 3"' : '';
        parts.push(
            `<line x1="${marginLeft}" y1="${y}" x2="${width - 10}" y2="${y}" ` +
            `stroke="#bbb" stroke-width="0.7"${dash}/>`,
        );
        parts.push(
            `<text x="${marginLeft - 5}" y="${y + 3}" text-anchor="end" font-size="9" ` +
            `font-family="sans-serif">${tick}</text>`,
        );
    }
    table.subjects.forEach((subject, i) => {
        const x0 = marginLeft + i * groupWidth;
        table.memberships[i].forEach((u, s) => {
            const h = u * plotHeight;
            const x = x0 + s * barWidth;
            const y = marginTop + plotHeight - h;
            const color = SERIES_COLORS[s % SERIES_COLORS.length];
            parts.push(
                `<rect class="membership-bar" x="${x}" y="${y.toFixed(2)}" width="${barWidth - 2}" ` +
                `height="${h.toFixed(2)}" fill="${color}"/>`,
            );
        });
        const cx = x0 + (nClusters * barWidth) / 2;
        parts.push(
            `<text x="${cx}" y="${marginTop + plotHeight + 10}" font-size="9" ` +
            `font-family="sans-serif" text-anchor="end" ` +
            `transform="rotate(-45 ${cx} ${marginTop + plotHeight + 10})">${subject}</text>`,
        );
    });
    for (let s = 0; s < nClusters; s++) {
        const x = marginLeft + s * 90;
        const y = height - 10;
        parts.push(
            `<rect x="${x}" y="${y - 8}" width="10" height="10" fill="${SERIES_COLORS[s % SERIES_COLORS.length]}"/>`,
        );
        parts.push(
            `<text x="${x + 14}" y="${y}" font-size="10" font-family="sans-serif">cluster ${s + 1}</text>`,
        );
    }
    parts.push('</svg>');
    return parts.join('\n');
}
