#!/usr/bin/env node
/** Batch entry points: one instance file in, one result file out. */

import { checkFeasibility } from "./feasibility.js"
import { readInstance, writeResult } from "./io.js"
import { solveP3 } from "./p3.js"

const USAGE = `usage:
  bacnoma-oracle solve-p3 <instance.json> <result.json>
  bacnoma-oracle check-feasibility <instance.json> <verdict.json>`

export function main(argv: string[]): number {
  const [command, instancePath, outPath] = argv
  if (!command || !instancePath || !outPath) {
    console.error(USAGE)
    return 2
  }
  let instance
  try {
    instance = readInstance(instancePath)
  } catch (err) {
    console.error(`error reading instance: ${(err as Error).message}`)
    return 2
  }
  if (command === "solve-p3") {
    writeResult(outPath, solveP3(instance))
    return 0
  }
  if (command === "check-feasibility") {
    writeResult(outPath, checkFeasibility(instance))
    return 0
  }
  console.error(USAGE)
  return 2
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)))
}
