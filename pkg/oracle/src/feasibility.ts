/** Can the whole payload be delivered inside the downlink slot?
 *
 * The pure-backscatter formulation asks for reflect powers with
 *
 *   sum(pr * h4) = gamma * (alpha * h_si * P0 + sigma2)      (payload)
 *   P0 h0 - g0t * (sum(pr * w_qos) + sigma2) >= 0            (QoS)
 *   0 <= pr <= P0 <= P0max,   gamma = 2^(L / (t0 B)) - 1.
 *
 * Scaling the reflect vector by one factor moves the payload side
 * continuously between 0 and its maximum while only relaxing the QoS
 * side, so the equality is reachable iff the LP maximum of
 * sum(pr h4) - gamma alpha h_si P0 over the inequality polytope reaches
 * gamma * sigma2.
 */

import { maxPayloadHeadroom } from "./lp.js"
import type { FeasibilityResult, Instance } from "./types.js"

const VERDICT_REL_TOL = 1e-9

export function payloadSnrThreshold(inst: Instance): number {
  return Math.expm1((inst.L_tilde / (inst.t0 * inst.B)) * Math.LN2)
}

export function checkFeasibility(inst: Instance): FeasibilityResult {
  const k = inst.h4.length
  const gamma = payloadSnrThreshold(inst)
  const lp = maxPayloadHeadroom(inst, gamma)
  const target = gamma * inst.sigma2
  if (!lp.feasible || lp.headroom < target * (1 - VERDICT_REL_TOL) - 1e-300) {
    return { verdict: "infeasible", p0: 0, p_r: new Array<number>(k).fill(0) }
  }
  // scale the maximizer down to hit the payload equality exactly
  const s = lp.pReflect.reduce((acc, pr, i) => acc + pr * inst.h4[i], 0)
  const need = gamma * (inst.alpha * inst.h_si_sq * lp.p0 + inst.sigma2)
  const scale = s > 0 ? Math.min(1, need / s) : 0
  return {
    verdict: "feasible",
    p0: lp.p0,
    p_r: lp.pReflect.map(pr => pr * scale),
  }
}
