// Scalp positions for the 12 analysis channels on the unit disc
// (nose toward +y), planar projection of the standard 10-20 montage.

export interface ChannelPosition {
    label: string;
    x: number;
    y: number;
}

export type ScalpLayout = ChannelPosition[];

export const STANDARD_LAYOUT: ScalpLayout = [
    { label: 'F3', x: -0.34, y: 0.45 },
    { label: 'F7', x: -0.752, y: 0.547 },
    { label: 'F4', x: 0.34, y: 0.45 },
    { label: 'F8', x: 0.752, y: 0.547 },
    { label: 'T3', x: -0.93, y: 0.0 },
    { label: 'T4', x: 0.93, y: 0.0 },
    { label: 'T5', x: -0.752, y: -0.547 },
    { label: 'T6', x: 0.752, y: -0.547 },
    { label: 'P3', x: -0.34, y: -0.45 },
    { label: 'P4', x: 0.34, y: -0.45 },
    { label: 'O1', x: -0.287, y: -0.884 },
    { label: 'O2', x: 0.287, y: -0.884 },
];

for (const pos of STANDARD_LAYOUT) {
    if (pos.x * pos.x + pos.y * pos.y > 1) {
        throw new Error(`layout position for ${pos.label} lies outside the unit disc`);
    }
}

/** Resolve channel labels to positions; unknown labels are an error. */
export function positionsFor(labels: string[], layout: ScalpLayout = STANDARD_LAYOUT): ChannelPosition[] {
    const byLabel = new Map(layout.map((p) => [p.label, p]));
    if (byLabel.size !== layout.length) {
        throw new Error('layout contains duplicate channel labels');
    }
    const missing = labels.filter((l) => !byLabel.has(l));
    if (missing.length > 0) {
        const known = layout.map((p) => p.label).join(', ');
        throw new Error(
            `unknown channel label(s) ${missing.join(', ')}; known labels: ${known}`,
        );
    }
    return labels.map((l) => byLabel.get(l)!);
}
