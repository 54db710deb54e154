// Minimal deterministic PNG encoder (8-bit RGBA, no ancillary chunks).

import * as zlib from 'node:zlib';

const CRC_TABLE = (() => {
    const table = new Uint32Array(256);
    for (let n = 0; n < 256; n++) {
        let c = n;
        for (let k = 0; k < 8; k++) {
            c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
        }
        table[n] = c >>> 0;
    }
    return table;
})();

function crc32(data: Buffer): number {
    let crc = 0xffffffff;
    for (const byte of data) {
        crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
    }
    return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Buffer): Buffer {
    const head = Buffer.alloc(4);
    head.writeUInt32BE(payload.length);
    const body = Buffer.concat([Buffer.from(type, 'ascii'), payload]);
    const crc = Buffer.alloc(4);
    crc.writeUInt32BE(crc32(body));
    return Buffer.concat([head, body, crc]);
}

/** Encode rgba (width * height * 4 bytes, row-major) as a PNG buffer. */
export function encodePng(rgba: Uint8Array, width: number, height: number): Buffer {
    if (rgba.length !== width * height * 4) {
        throw new Error('rgba buffer does not match width * height * 4');
    }
    const ihdr = Buffer.alloc(13);
    ihdr.writeUInt32BE(width, 0);
    ihdr.writeUInt32BE(height, 4);
    ihdr[8] = 8; // bit depth
    ihdr[9] = 6; // color type RGBA
    // compression, filter, interlace all 0

    const raw = Buffer.alloc(height * (1 + width * 4));
    for (let row = 0; row < height; row++) {
        raw[row * (1 + width * 4)] = 0; // filter type none
        rgba
            .subarray(row * width * 4, (row + 1) * width * 4)
            .forEach((value, i) => {
                raw[row * (1 + width * 4) + 1 + i] = value;
            });
    }
    const idat = zlib.deflateSync(raw, { level: 9 });
    return Buffer.concat([
        Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
        chunk('IHDR', ihdr),
        chunk('IDAT', idat),
        chunk('IEND', Buffer.alloc(0)),
    ]);
}
