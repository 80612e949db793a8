import type { ApiClient } from './api';

export type SaveBlob = (blob: Blob, filename: string) => void;

export function browserSaveBlob(blob: Blob, filename: string): void {
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement('a');
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

/**
 * Download the session export. The bytes go into the file exactly as the
 * service sent them, so the saved document equals GET /export byte for byte.
 */
export async function downloadExport(
  api: ApiClient,
  sessionId: string,
  save: SaveBlob = browserSaveBlob,
): Promise<Uint8Array> {
  const bytes = await api.exportSession(sessionId);
  const buffer = new ArrayBuffer(bytes.byteLength);
  new Uint8Array(buffer).set(bytes);
  save(new Blob([buffer], { type: 'application/json' }), `${sessionId}.json`);
  return bytes;
}
