// Batch scalp-map rendering of per-subject channel weight vectors.

import { TopologyTable } from './csv.js';
import { DEFAULT_BANDWIDTH, DEFAULT_GRID, kernelField } from './field.js';
import { rampColor, rampHex } from './color.js';
import { ChannelPosition, ScalpLayout, STANDARD_LAYOUT, positionsFor } from './layout.js';
import { encodePng } from './png.js';

export interface TopomapOptions {
    gridSize?: number;
    bandwidth?: number;
    columns?: number;
    panelSize?: number;
}

function rasterize(
    weights: number[],
    positions: ChannelPosition[],
    scaleMax: number,
    gridSize: number,
    bandwidth: number,
): Buffer {
    const field = kernelField(weights, positions, gridSize, bandwidth);
    const rgba = new Uint8Array(gridSize * gridSize * 4);
    for (let i = 0; i < field.length; i++) {
        const v = field[i];
        if (Number.isNaN(v)) {
            rgba[i * 4 + 3] = 0; // transparent outside the disc
            continue;
        }
        const t = scaleMax > 0 ? v / scaleMax : 0;
        const [r, g, b] = rampColor(t);
        rgba[i * 4] = r;
        rgba[i * 4 + 1] = g;
        rgba[i * 4 + 2] = b;
        rgba[i * 4 + 3] = 255;
    }
    return encodePng(rgba, gridSize, gridSize);
}

function headOverlay(cx: number, cy: number, radius: number, positions: ChannelPosition[]): string {
    const parts: string[] = [];
    parts.push(
        `<circle cx="${cx}" cy="${cy}" r="${radius}" fill="none" stroke="#333" stroke-width="1.5"/>`,
    );
    const noseTip = cy - radius - 6;
    parts.push(
        `<path d="M ${cx - 7} ${cy - radius + 1} L ${cx} ${noseTip} L ${cx + 7} ${cy - radius + 1}" ` +
        `fill="none" stroke="#333" stroke-width="1.5"/>`,
    );
    for (const pos of positions) {
        const px = cx + pos.x * radius;
        const py = cy - pos.y * radius;
        parts.push(`<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="1.8" fill="#222"/>`);
    }
    return parts.join('\n');
}

function colorbar(x: number, y: number, width: number, height: number, scaleMax: number): string {
    const stops = Array.from({ length: 11 }, (_, i) => {
        const t = i / 10;
        return `<stop offset="${(t * 100).toFixed(0)}%" stop-color="${rampHex(1 - t)}"/>`;
    }).join('');
    return [
        `<defs><linearGradient id="ramp" x1="0" y1="0" x2="0" y2="1">${stops}</linearGradient></defs>`,
        `<rect x="${x}" y="${y}" width="${width}" height="${height}" fill="url(#ramp)" stroke="#333" stroke-width="0.5"/>`,
        `<text x="${x + width + 4}" y="${y + 8}" font-size="10" font-family="sans-serif">${scaleMax.toPrecision(3)}</text>`,
        `<text x="${x + width + 4}" y="${y + height}" font-size="10" font-family="sans-serif">0</text>`,
    ].join('\n');
}

/**
 * Render one panel per subject row with a shared color scale and a single
 * colorbar. Deterministic: identical inputs produce identical bytes.
 */
export function renderTopomapBatch(
    table: TopologyTable,
    layout: ScalpLayout = STANDARD_LAYOUT,
    options: TopomapOptions = {},
): string {
    const gridSize = options.gridSize ?? DEFAULT_GRID;
    const bandwidth = options.bandwidth ?? DEFAULT_BANDWIDTH;
    const columns = options.columns ?? Math.min(7, Math.max(1, table.subjects.length));
    const panel = options.panelSize ?? 150;
    const positions = positionsFor(table.channels, layout);
    for (const row of table.values) {
        if (row.some((w) => w < 0 || !Number.isFinite(w))) {
            throw new Error('topography weights must be finite and nonnegative');
        }
    }
    const scaleMax = Math.max(...table.values.flat(), 0);

    const nRows = Math.ceil(table.subjects.length / columns);
    const margin = 16;
    const labelSpace = 16;
    const barSpace = 70;
    const width = margin * 2 + columns * panel + barSpace;
    const height = margin * 2 + nRows * (panel + labelSpace);
    const parts: string[] = [];
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}">`,
    );
    parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
    parts.push(
        `<!-- kernel bandwidth ${bandwidth} disc radii, grid ${gridSize}x${gridSize}, shared scale max ${scaleMax.toPrecision(6)} -->`,
    );

    table.subjects.forEach((subject, idx) => {
        const col = idx % columns;
        const rowIdx = Math.floor(idx / columns);
        const x0 = margin + col * panel;
        const y0 = margin + rowIdx * (panel + labelSpace);
        const inner = panel - 18;
        const png = rasterize(table.values[idx], positions, scaleMax, gridSize, bandwidth);
        parts.push(
            `<image x="${x0 + 9}" y="${y0 + 9}" width="${inner}" height="${inner}" ` +
            `href="data:image/png;base64,${png.toString('base64')}"/>`,
        );
        parts.push(headOverlay(x0 + panel / 2, y0 + panel / 2, inner / 2, positions));
        parts.push(
            `<text x="${x0 + panel / 2}" y="${y0 + panel + 10}" text-anchor="middle" ` +
            `font-size="11" font-family="sans-serif">${subject}</text>`,
        );
    });
    parts.push(colorbar(width - barSpace + 10, margin + 10, 14, height - 2 * margin - 20, scaleMax));
    parts.push('</svg>');
    return parts.join('\n');
}
