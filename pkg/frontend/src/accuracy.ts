// Accuracy-versus-fuzziness line chart from the pipeline summary.

import { SummaryPerM } from './csv.js';

export function renderAccuracyChart(perM: SummaryPerM[], title: string): string | null {
    const points = perM.filter((p) => p.accuracy !== null);
    if (points.length === 0) return null;
    const width = 360;
    const height = 240;
    const left = 45;
    const bottom = 35;
    const top = 25;
    const right = 15;
    const plotW = width - left - right;
    const plotH = height - top - bottom;
    const ms = points.map((p) => p.m);
    const mLo = Math.min(...ms);
    const mHi = Math.max(...ms);
    const span = mHi > mLo ? mHi - mLo : 1;
    const xOf = (m: number) => left + ((m - mLo) / span) * plotW;
    const yOf = (a: number) => top + (1 - (a - 0.5) / 0.5) * plotH;

    const parts: string[] = [];
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    );
    parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
    parts.push(
        `<text x="${width / 2}" y="14" text-anchor="middle" font-size="12" font-family="sans-serif">${title}</text>`,
    );
    for (const tick of [0.5, 0.75, 1.0]) {
        const y = yOf(tick);
        parts.push(`<line x1="${left}" y1="${y}" x2="${width - right}" y2="${y}" stroke="#ccc" stroke-width="0.7"/>`);
        parts.push(`<text x="${left - 5}" y="${y + 3}" text-anchor="end" font-size="9" font-family="sans-serif">${tick}</text>`);
    }
    for (const p of points) {
        const x = xOf(p.m);
        parts.push(`<text x="${x}" y="${height - bottom + 14}" text-anchor="middle" font-size="9" font-family="sans-serif">${p.m}</text>`);
    }
    parts.push(
        `<text x="${width / 2}" y="${height - 6}" text-anchor="middle" font-size="10" font-family="sans-serif">fuzziness m</text>`,
    );
    const path = points
        .map((p, i) => `${i === 0 ? 'M' : 'L'} ${xOf(p.m).toFixed(2)} ${yOf(p.accuracy as number).toFixed(2)}`)
        .join(' ');
    parts.push(`<path d="${path}" fill="none" stroke="#1f77b4" stroke-width="1.8"/>`);
    for (const p of points) {
        parts.push(
            `<circle cx="${xOf(p.m).toFixed(2)}" cy="${yOf(p.accuracy as number).toFixed(2)}" r="3" fill="#1f77b4"/>`,
        );
    }
    parts.push('</svg>');
    return parts.join('\n');
}
