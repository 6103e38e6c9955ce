/** YALPS model builders for the two subproblems, with row/column scaling.
 *
 * Channel gains span ~20 orders of magnitude, so every model normalizes
 * variables to [0, 1] (powers divided by their cap) and divides each row
 * by its largest coefficient before handing the LP to the simplex solver.
 */

import { solve, type Model } from "yalps"
import type { Instance } from "./types.js"

export interface ReflectLpResult {
  /** best sum of p_r[k] * h4[k] (watt * gain units) */
  s: number
  /** reflect powers in watts, one per device */
  pReflect: number[]
  feasible: boolean
}

const PRECISION = 1e-12

function rowScale(coefficients: number[]): number {
  const m = Math.max(...coefficients.map(Math.abs))
  return m > 0 ? m : 1
}

/** max sum(pr * h4) s.t. g0t * sum(pr * w_qos) <= P0 h0 - g0t sigma2, 0 <= pr <= P0. */
export function maxReflectSum(inst: Instance, p0: number): ReflectLpResult {
  const k = inst.h4.length
  const zero = { s: 0, pReflect: new Array<number>(k).fill(0), feasible: true }
  if (p0 <= 0) return zero
  const budget = p0 * inst.h0_sq - inst.gamma0_tilde * inst.sigma2
  if (budget < 0) return { ...zero, feasible: false }

  const objCoefs = inst.h4.map(v => v * p0)
  const objScale = rowScale(objCoefs)
  const budgetCoefs = inst.w_qos.map(w => inst.gamma0_tilde * w * p0)
  const budgetScale = rowScale([...budgetCoefs, budget])

  const constraints: Record<string, { max: number }> = {
    budget: { max: budget / budgetScale },
  }
  const variables: Record<string, Record<string, number>> = {}
  for (let i = 0; i < k; i++) {
    constraints[`box${i}`] = { max: 1 }
    variables[`x${i}`] = {
      obj: objCoefs[i] / objScale,
      budget: budgetCoefs[i] / budgetScale,
      [`box${i}`]: 1,
    }
  }
  const model: Model = {
    direction: "maximize",
    objective: "obj",
    constraints,
    variables,
  }
  const solution = solve(model, { precision: PRECISION })
  if (solution.status !== "optimal") return { ...zero, feasible: false }
  const pReflect = new Array<number>(k).fill(0)
  for (const [name, value] of solution.variables) {
    pReflect[Number(name.slice(1))] = value * p0
  }
  return { s: solution.result * objScale, pReflect, feasible: true }
}

export interface HeadroomLpResult {
  feasible: boolean
  /** max of sum(pr h4) - gamma alpha h_si P0 over the QoS polytope */
  headroom: number
  p0: number
  pReflect: number[]
}

/**
 * max sum(pr * h4) - gamma * alpha * h_si * P0 over
 * P0 h0 - g0t (sum(pr w_qos) + sigma2) >= 0, 0 <= pr <= P0 <= P0max.
 */
export function maxPayloadHeadroom(inst: Instance, gamma: number): HeadroomLpResult {
  const k = inst.h4.length
  const cap = inst.p0_max
  const none = { feasible: false, headroom: -Infinity, p0: 0, pReflect: new Array<number>(k).fill(0) }
  if (cap <= 0) {
    // only the all-zero point exists; it satisfies QoS iff the floor is zero
    return inst.gamma0_tilde * inst.sigma2 <= 0
      ? { feasible: true, headroom: 0, p0: 0, pReflect: none.pReflect }
      : none
  }

  const siCoef = gamma * inst.alpha * inst.h_si_sq * cap
  const objCoefs = [...inst.h4.map(v => v * cap), siCoef]
  const objScale = rowScale(objCoefs)
  const qosCoefs = [...inst.w_qos.map(w => inst.gamma0_tilde * w * cap), inst.h0_sq * cap]
  const qosScale = rowScale([...qosCoefs, inst.gamma0_tilde * inst.sigma2])

  const constraints: Record<string, { max: number }> = {
    qbox: { max: 1 },
    qos: { max: -(inst.gamma0_tilde * inst.sigma2) / qosScale },
  }
  const qCoefs: Record<string, number> = {
    obj: -siCoef / objScale,
    qos: -(inst.h0_sq * cap) / qosScale,
    qbox: 1,
  }
  const variables: Record<string, Record<string, number>> = { q: qCoefs }
  for (let i = 0; i < k; i++) {
    constraints[`cap${i}`] = { max: 0 } // x_i - q <= 0
    qCoefs[`cap${i}`] = -1
    variables[`x${i}`] = {
      obj: (inst.h4[i] * cap) / objScale,
      qos: (inst.gamma0_tilde * inst.w_qos[i] * cap) / qosScale,
      [`cap${i}`]: 1,
    }
  }
  const model: Model = {
    direction: "maximize",
    objective: "obj",
    constraints,
    variables,
  }
  const solution = solve(model, { precision: PRECISION })
  if (solution.status !== "optimal") return none
  let q = 0
  const pReflect = new Array<number>(k).fill(0)
  for (const [name, value] of solution.variables) {
    if (name === "q") q = value * cap
    else pReflect[Number(name.slice(1))] = value * cap
  }
  return { feasible: true, headroom: solution.result * objScale, p0: q, pReflect }
}
