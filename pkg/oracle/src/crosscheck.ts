#!/usr/bin/env node
/** Agreement run against the solver service, over external interfaces only.
 *
 * Spawns the Python service (`python3 -m bacnoma.cli serve`), then for a
 * batch of seeds: pulls dumped instances, re-solves them here, and compares
 * against the service's own answers.  Feasibility verdicts must agree
 * exactly; subproblem objectives must agree to 1e-5 relative.
 */

import { spawn, type ChildProcess } from "node:child_process"

import { checkFeasibility } from "./feasibility.js"
import { solveP3 } from "./p3.js"
import { parseInstance } from "./types.js"

export const OBJECTIVE_REL_TOL = 1e-5

export interface ServiceHandle {
  base: string
  stop: () => void
}

export async function startService(port = 8731): Promise<ServiceHandle> {
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "bacnoma.cli", "serve", "--host", "127.0.0.1", "--port", String(port)],
    { stdio: "ignore" }
  )
  const base = `http://127.0.0.1:${port}`
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${base}/healthz`)
      if (res.ok) return { base, stop: () => child.kill() }
    } catch {
      // not up yet
    }
    await new Promise(r => setTimeout(r, 200))
  }
  child.kill()
  throw new Error("solver service did not come up")
}

async function post(base: string, path: string, body: unknown): Promise<any> {
  const res = await fetch(`${base}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  })
  if (!res.ok) throw new Error(`${path} -> HTTP ${res.status}: ${await res.text()}`)
  return res.json()
}

export interface AgreementReport {
  feasibilityChecked: number
  feasibilityAgreed: number
  objectivesChecked: number
  objectivesAgreed: number
  worstObjectiveGap: number
  mismatches: string[]
}

export async function runAgreement(
  base: string,
  count = 50
): Promise<AgreementReport> {
  const report: AgreementReport = {
    feasibilityChecked: 0,
    feasibilityAgreed: 0,
    objectivesChecked: 0,
    objectivesAgreed: 0,
    worstObjectiveGap: 0,
    mismatches: [],
  }

  // feasibility verdicts: iteration-0 dumps exist for every realization
  for (let seed = 0; report.feasibilityChecked < count; seed++) {
    const single = await post(base, "/api/single", { seed })
    const dumped = await post(base, "/api/dump-instance", { seed, iteration: 0 })
    const verdict = checkFeasibility(parseInstance(dumped)).verdict
    const reference = single.scheme === "pure-bac" ? "feasible" : "infeasible"
    report.feasibilityChecked++
    if (verdict === reference) report.feasibilityAgreed++
    else report.mismatches.push(`seed ${seed}: verdict ${verdict} vs scheme ${single.scheme}`)
  }

  // subproblem objectives: replay the (y, mu) state of the first iteration
  for (let seed = 0; report.objectivesChecked < count; seed++) {
    const single = await post(base, "/api/single", { seed })
    if (single.scheme !== "hybrid" || single.iterations < 1) continue
    const dumped = await post(base, "/api/dump-instance", { seed, iteration: 1 })
    const instance = parseInstance(dumped)
    const reference = await post(base, "/api/solve-instance", { instance: dumped })
    const ours = solveP3(instance)
    report.objectivesChecked++
    if (ours.status !== reference.status) {
      report.mismatches.push(
        `seed ${seed}: status ${ours.status} vs ${reference.status}`
      )
      continue
    }
    if (ours.status !== "ok") {
      report.objectivesAgreed++
      continue
    }
    // the objective is in bits, so differences below one bit are noise;
    // floor the denominator accordingly (ratio values near the optimum
    // drive the objective itself to zero by construction)
    const gap =
      Math.abs(ours.objective_bits! - reference.objective_bits) /
      Math.max(Math.abs(reference.objective_bits), 1.0)
    report.worstObjectiveGap = Math.max(report.worstObjectiveGap, gap)
    if (gap <= OBJECTIVE_REL_TOL) report.objectivesAgreed++
    else
      report.mismatches.push(
        `seed ${seed}: objective ${ours.objective_bits} vs ${reference.objective_bits} (gap ${gap.toExponential(2)})`
      )
  }
  return report
}

async function main(): Promise<number> {
  const service = await startService()
  try {
    const report = await runAgreement(service.base)
    console.log(
      `feasibility: ${report.feasibilityAgreed}/${report.feasibilityChecked} agree`
    )
    console.log(
      `objectives:  ${report.objectivesAgreed}/${report.objectivesChecked} agree ` +
        `(worst gap ${report.worstObjectiveGap.toExponential(2)})`
    )
    for (const m of report.mismatches) console.error(`MISMATCH ${m}`)
    return report.mismatches.length === 0 ? 0 : 1
  } finally {
    service.stop()
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  main().then(code => process.exit(code))
}
