#!/usr/bin/env python3
"""Generates src/core/unicode_tables.inc from Python's unicodedata.

Emits canonical decomposition mappings, combining classes, and primary
composition pairs for NFC normalization, plus the White_Space code points.
Hangul syllables are handled algorithmically in C++ and excluded here.
"""
import sys
import unicodedata

SHANGUL = 0xAC00
NHANGUL = 11172

def canonical_decomposition(cp):
    d = unicodedata.decomposition(chr(cp))
    if not d or d.startswith("<"):
        return None
    return [int(x, 16) for x in d.split()]

def main(out_path):
    decomp = {}      # cp -> (first, second_or_0)
    ccc = {}         # cp -> combining class (nonzero only)
    compose = []     # (first, second, composite), primary composites only

    for cp in range(0x110000):
        if SHANGUL <= cp < SHANGUL + NHANGUL:
            continue
        c = ccc_of = unicodedata.combining(chr(cp))
        if ccc_of:
            ccc[cp] = ccc_of
        d = canonical_decomposition(cp)
        if d:
            if len(d) == 1:
                decomp[cp] = (d[0], 0)
            else:
                assert len(d) == 2, hex(cp)
                decomp[cp] = (d[0], d[1])
                # primary composite: NFC(NFD(c)) == c and starter first char
                nfd = unicodedata.normalize("NFD", chr(cp))
                if (unicodedata.normalize("NFC", nfd) == chr(cp)
                        and unicodedata.combining(chr(d[0])) == 0):
                    compose.append((d[0], d[1], cp))

    whitespace = [cp for cp in range(0x110000)
                  if chr(cp).isspace() or cp in (0x85, 0xA0)]

    with open(out_path, "w") as f:
        w = f.write
        w("// Generated by scripts/gen_unicode_tables.py (Unicode %s). Do not edit.\n\n"
          % unicodedata.unidata_version)
        w("struct DecompEntry { uint32_t cp; uint32_t first; uint32_t second; };\n")
        w("struct CccEntry { uint32_t cp; uint8_t ccc; };\n")
        w("struct ComposeEntry { uint32_t first; uint32_t second; uint32_t composite; };\n\n")

        w("static constexpr DecompEntry kDecomp[] = {\n")
        for cp in sorted(decomp):
            a, b = decomp[cp]
            w("  {0x%X,0x%X,0x%X},\n" % (cp, a, b))
        w("};\n\n")

        w("static constexpr CccEntry kCcc[] = {\n")
        for cp in sorted(ccc):
            w("  {0x%X,%d},\n" % (cp, ccc[cp]))
        w("};\n\n")

        compose.sort()
        w("static constexpr ComposeEntry kCompose[] = {\n")
        for a, b, c in compose:
            w("  {0x%X,0x%X,0x%X},\n" % (a, b, c))
        w("};\n\n")

        w("static constexpr uint32_t kWhitespace[] = {\n  ")
        w(",".join("0x%X" % cp for cp in whitespace))
        w("\n};\n")

    print("decomp=%d ccc=%d compose=%d ws=%d" %
          (len(decomp), len(ccc), len(compose), len(whitespace)))

if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/core/unicode_tables.inc")
