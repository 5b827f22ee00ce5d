/**
 * Dialogue snippet extraction from raw screenplay text, mirroring the
 * server's grammar closely enough for captions: cue blocks (an
 * uppercase line between a blank line and a non-blank line) and the
 * one-line "NAME: text" form.  The server stays authoritative for
 * structure; a miss here only blanks a caption.
 */

const CUE = /^[A-Z0-9 .\-]+$/;
const INLINE = /^([A-Z0-9 .\-]+):\s*(\S.*)$/;
const HEADINGS = ["INT.", "EXT.", "INT-EXT."];

export function extractDialogueTexts(source: string): string[] {
  const lines = source.split("\n").map((l) => l.trim());
  const texts: string[] = [];
  let i = 0;
  while (i < lines.length) {
    const text = lines[i];
    if (!text || HEADINGS.some((h) => text.startsWith(h))) {
      i += 1;
      continue;
    }
    const prevBlank = i === 0 || !lines[i - 1];
    const nextNonblank = i + 1 < lines.length && !!lines[i + 1];
    if (CUE.test(text) && prevBlank && nextNonblank) {
      let j = i + 1;
      const parts: string[] = [];
      while (j < lines.length && lines[j]) {
        const body = lines[j];
        if (!(j === i + 1 && body.startsWith("(") && body.endsWith(")"))) {
          parts.push(body);
        }
        j += 1;
      }
      if (parts.length) texts.push(parts.join(" "));
      i = j;
      continue;
    }
    const inline = INLINE.exec(text);
    if (inline) texts.push(inline[2].trim());
    i += 1;
  }
  return texts;
}
