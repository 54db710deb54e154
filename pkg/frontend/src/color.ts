// Sequential light-to-dark ramp: darker color = higher magnitude.

const ANCHORS: Array<[number, number, number]> = [
    [255, 255, 255],
    [198, 219, 239],
    [107, 174, 214],
    [33, 113, 181],
    [8, 48, 107],
];

export function rampColor(t: number): [number, number, number] {
    const clamped = Math.min(1, Math.max(0, t));
    const scaled = clamped * (ANCHORS.length - 1);
    const lo = Math.min(Math.floor(scaled), ANCHORS.length - 2);
    const frac = scaled - lo;
    const a = ANCHORS[lo];
    const b = ANCHORS[lo + 1];
    return [
        Math.round(a[0] + frac * (b[0] - a[0])),
        Math.round(a[1] + frac * (b[1] - a[1])),
        Math.round(a[2] + frac * (b[2] - a[2])),
    ];
}

export function rampHex(t: number): string {
    const [r, g, b] = rampColor(t);
    return '#' + [r, g, b].map((c) => c.toString(16).padStart(2, '0')).join('');
}
