/** Just enough YUV4MPEG2 parsing to preview the served video: header, then
 * FRAME-delimited planes. Only the luma plane is kept; the preview renders
 * grayscale. */

export interface Y4mVideo {
  width: number;
  height: number;
  fpsNum: number;
  fpsDen: number;
  /** Luma planes, one Uint8Array of width*height bytes per frame. */
  frames: Uint8Array[];
}

const NEWLINE = 0x0a;

function readLine(bytes: Uint8Array, from: number): { text: string; next: number } {
  let end = from;
  while (end < bytes.length && bytes[end] !== NEWLINE) end++;
  if (end >= bytes.length) throw new Error('truncated y4m stream');
  let text = '';
  for (let i = from; i < end; i++) text += String.fromCharCode(bytes[i]);
  return { text, next: end + 1 };
}

export function parseY4m(buffer: ArrayBuffer): Y4mVideo {
  const bytes = new Uint8Array(buffer);
  const header = readLine(bytes, 0);
  const fields = header.text.split(' ');
  if (fields[0] !== 'YUV4MPEG2') throw new Error('not a y4m stream');

  let width = 0;
  let height = 0;
  let fpsNum = 25;
  let fpsDen = 1;
  let chroma = '420jpeg';
  for (const f of fields.slice(1)) {
    if (f.startsWith('W')) width = parseInt(f.slice(1), 10);
    else if (f.startsWith('H')) height = parseInt(f.slice(1), 10);
    else if (f.startsWith('F')) {
      const [n, d] = f.slice(1).split(':');
      fpsNum = parseInt(n, 10);
      fpsDen = parseInt(d, 10);
    } else if (f.startsWith('C')) chroma = f.slice(1);
  }
  if (!width || !height) throw new Error('y4m header missing dimensions');

  const lumaSize = width * height;
  let frameSize: number;
  if (chroma === 'mono') frameSize = lumaSize;
  else if (chroma === '420jpeg' || chroma === '420' || chroma === '420mpeg2') {
    frameSize = lumaSize + 2 * Math.ceil(width / 2) * Math.ceil(height / 2);
  } else throw new Error(`unsupported chroma mode ${chroma}`);

  const frames: Uint8Array[] = [];
  let pos = header.next;
  while (pos < bytes.length) {
    const marker = readLine(bytes, pos);
    if (!marker.text.startsWith('FRAME')) throw new Error('bad FRAME marker');
    pos = marker.next;
    if (pos + frameSize > bytes.length) throw new Error('truncated frame');
    frames.push(bytes.slice(pos, pos + lumaSize));
    pos += frameSize;
  }
  return { width, height, fpsNum, fpsDen, frames };
}

export function frameIndexAt(video: Y4mVideo, playheadMs: number): number {
  const periodMs = (1000 * video.fpsDen) / video.fpsNum;
  const i = Math.floor(playheadMs / periodMs);
  return Math.max(0, Math.min(video.frames.length - 1, i));
}
