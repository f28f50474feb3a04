/** Big-endian byte assembly plus the modified UTF-8 encoding classfiles use. */

export class ByteWriter {
  private chunks: number[] = [];

  u1(v: number): this {
    this.chunks.push(v & 0xff);
    return this;
  }

  u2(v: number): this {
    return this.u1(v >>> 8).u1(v);
  }

  u4(v: number): this {
    return this.u2(v >>> 16).u2(v);
  }

  s1(v: number): this {
    return this.u1(v < 0 ? v + 0x100 : v);
  }

  s2(v: number): this {
    return this.u2(v < 0 ? v + 0x10000 : v);
  }

  s4(v: number): this {
    return this.u4(v < 0 ? v + 0x100000000 : v);
  }

  raw(data: Uint8Array | number[]): this {
    for (const b of data) this.chunks.push(b & 0xff);
    return this;
  }

  get length(): number {
    return this.chunks.length;
  }

  bytes(): Uint8Array {
    return Uint8Array.from(this.chunks);
  }
}

/** Encode a string as JVM modified UTF-8 (NUL as C0 80, astral chars as
 * surrogate pairs in three-byte form). JavaScript strings are already
 * UTF-16, so each code unit maps directly. */
export function mutf8(text: string): Uint8Array {
  const out: number[] = [];
  for (let i = 0; i < text.length; i++) {
    const c = text.charCodeAt(i);
    if (c === 0) {
      out.push(0xc0, 0x80);
    } else if (c < 0x80) {
      out.push(c);
    } else if (c < 0x800) {
      out.push(0xc0 | (c >> 6), 0x80 | (c & 0x3f));
    } else {
      out.push(0xe0 | (c >> 12), 0x80 | ((c >> 6) & 0x3f), 0x80 | (c & 0x3f));
    }
  }
  return Uint8Array.from(out);
}
