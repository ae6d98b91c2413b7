/**
 * Helper for fetching the public INSEE first-names database (the national
 * file, all years, ";"-separated with columns sexe;preusuel;annais;nombre).
 */

import { writeFile } from "node:fs/promises";

export const INSEE_FIRST_NAMES_PAGE = "https://www.insee.fr/fr/statistiques/2540004";
export const INSEE_FIRST_NAMES_FILE =
  "https://www.insee.fr/fr/statistiques/fichier/2540004/nat2021_csv.zip";

/**
 * Download the names export to `outPath`. Returns the byte count. The
 * export is a zip archive; unzip it and feed the contained CSV to the
 * engine's names input.
 */
export async function downloadNamesDb(
  outPath: string,
  url: string = INSEE_FIRST_NAMES_FILE,
): Promise<number> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`download failed: HTTP ${response.status} for ${url}`);
  }
  const bytes = Buffer.from(await response.arrayBuffer());
  await writeFile(outPath, bytes);
  return bytes.length;
}
