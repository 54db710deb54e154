// Gaussian-kernel interpolation of channel weights over a disc grid.
//
// The field is an augmented radial-basis interpolant: a constant term plus
// Gaussian bumps at the channel sites, fitted so the field passes through
// every channel's weight exactly (subject to a zero-sum constraint on the
// bump coefficients). A constant weight vector therefore yields an exactly
// constant field, and a one-hot weight peaks at its channel.

import { ChannelPosition } from './layout.js';

export const DEFAULT_GRID = 128;
export const DEFAULT_BANDWIDTH = 0.35; // in disc radii

/** Center coordinate of grid cell index i along one axis. */
export function cellCenter(i: number, gridSize: number): number {
    return -1 + (2 * (i + 0.5)) / gridSize;
}

/** Solve a dense linear system by Gaussian elimination with pivoting. */
function solveLinear(matrix: number[][], rhs: number[]): number[] {
    const n = rhs.length;
    const a = matrix.map((row, i) => [...row, rhs[i]]);
    for (let col = 0; col < n; col++) {
        let pivot = col;
        for (let row = col + 1; row < n; row++) {
            if (Math.abs(a[row][col]) > Math.abs(a[pivot][col])) pivot = row;
        }
        if (Math.abs(a[pivot][col]) < 1e-14) {
            throw new Error('interpolation system is singular');
        }
        [a[col], a[pivot]] = [a[pivot], a[col]];
        for (let row = col + 1; row < n; row++) {
            const factor = a[row][col] / a[col][col];
            for (let k = col; k <= n; k++) a[row][k] -= factor * a[col][k];
        }
    }
    const x = new Array(n).fill(0);
    for (let row = n - 1; row >= 0; row--) {
        let acc = a[row][n];
        for (let k = row + 1; k < n; k++) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return x;
}

function gaussian(d2: number, bandwidth: number): number {
    return Math.exp(-d2 / (2 * bandwidth * bandwidth));
}

/**
 * Interpolated field on a gridSize x gridSize lattice covering [-1, 1]^2.
 * Cells outside the unit disc are NaN.
 */
export function kernelField(
    weights: number[],
    positions: ChannelPosition[],
    gridSize: number = DEFAULT_GRID,
    bandwidth: number = DEFAULT_BANDWIDTH,
): Float64Array {
    const n = positions.length;
    if (weights.length !== n) {
        throw new Error(`${weights.length} weights for ${n} positions`);
    }
    if (weights.some((w) => !Number.isFinite(w) || w < 0)) {
        throw new Error('topography weights must be finite and nonnegative');
    }

    // augmented system: [K + ridge, 1; 1', 0] [alpha; c] = [w; 0]
    const system: number[][] = [];
    for (let i = 0; i < n; i++) {
        const row = new Array(n + 1).fill(0);
        for (let j = 0; j < n; j++) {
            const dx = positions[i].x - positions[j].x;
            const dy = positions[i].y - positions[j].y;
            row[j] = gaussian(dx * dx + dy * dy, bandwidth) + (i === j ? 1e-10 : 0);
        }
        row[n] = 1;
        system.push(row);
    }
    const lastRow = new Array(n + 1).fill(1);
    lastRow[n] = 0;
    system.push(lastRow);
    const solution = solveLinear(system, [...weights, 0]);
    const alpha = solution.slice(0, n);
    const constant = solution[n];

    const field = new Float64Array(gridSize * gridSize).fill(Number.NaN);
    for (let row = 0; row < gridSize; row++) {
        const y = -cellCenter(row, gridSize); // row 0 at the top of the image
        for (let col = 0; col < gridSize; col++) {
            const x = cellCenter(col, gridSize);
            if (x * x + y * y > 1) continue;
            let value = constant;
            for (let k = 0; k < n; k++) {
                const dx = x - positions[k].x;
                const dy = y - positions[k].y;
                value += alpha[k] * gaussian(dx * dx + dy * dy, bandwidth);
            }
            field[row * gridSize + col] = value;
        }
    }
    return field;
}

/** Location of the largest field value (first occurrence wins ties). */
export function peakLocation(field: Float64Array, gridSize: number): { x: number; y: number } {
    let best = -Infinity;
    let bestIdx = -1;
    for (let i = 0; i < field.length; i++) {
        const v = field[i];
        if (!Number.isNaN(v) && v > best) {
            best = v;
            bestIdx = i;
        }
    }
    if (bestIdx < 0) throw new Error('field has no in-disc cells');
    const row = Math.floor(bestIdx / gridSize);
    const col = bestIdx % gridSize;
    return { x: cellCenter(col, gridSize), y: -cellCenter(row, gridSize) };
}

/** Max minus min over in-disc cells. */
export function fieldRange(field: Float64Array): number {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of field) {
        if (Number.isNaN(v)) continue;
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    return hi - lo;
}
