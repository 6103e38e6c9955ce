import { readFileSync, writeFileSync } from "node:fs"

import { parseInstance, type Instance } from "./types.js"

export function readInstance(path: string): Instance {
  return parseInstance(JSON.parse(readFileSync(path, "utf-8")))
}

export function writeResult(path: string, result: unknown): void {
  writeFileSync(path, JSON.stringify(result, null, 2) + "\n", "utf-8")
}
