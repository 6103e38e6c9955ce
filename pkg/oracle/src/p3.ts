/** Re-solve one dumped subproblem instance with fixed auxiliaries (y, mu).
 *
 * The objective splits into independent pieces:
 *
 *   minimize  L - mu * B log2(1 + sum(pa h2)/sigma2)
 *             - t0 * B log2(1 + 2y sqrt(sum(pr h4)) - y^2 (alpha h_si P0 + sigma2))
 *
 * Active powers only appear in a monotone term under per-device boxes
 * (pa <= pa_max and mu*pa <= e_max), so they sit at the common corner.
 * For the reflect piece, the inner maximum of sum(pr h4) at fixed P0 is a
 * small LP; the resulting one-dimensional function of P0 is concave on the
 * QoS-admissible range and a scan plus ternary refinement locates its
 * maximum.
 */

import { maxReflectSum } from "./lp.js"
import type { Instance, P3Result } from "./types.js"

const SCAN_POINTS = 65
const TERNARY_ITERS = 120

export function solveP3(inst: Instance): P3Result {
  const k = inst.h4.length
  const zeros = () => new Array<number>(k).fill(0)
  const siPerWatt = inst.alpha * inst.h_si_sq

  const p0Min =
    inst.gamma0_tilde <= 0
      ? 0
      : inst.h0_sq > 0
        ? (inst.gamma0_tilde * inst.sigma2) / inst.h0_sq
        : Infinity
  if (p0Min > inst.p0_max) {
    return { objective_bits: null, p0: 0, p_r: zeros(), p_a: zeros(), status: "infeasible" }
  }

  const surrogate = (p0: number): number => {
    const { s } = maxReflectSum(inst, p0)
    return 2 * inst.y * Math.sqrt(s) - inst.y * inst.y * (siPerWatt * p0 + inst.sigma2)
  }

  let p0Star: number
  if (inst.y <= 0) {
    p0Star = inst.p0_max // the reflect term vanishes identically; any point works
  } else {
    let bestX = -Infinity
    let bestI = 0
    const grid: number[] = []
    for (let i = 0; i < SCAN_POINTS; i++) {
      grid.push(p0Min + ((inst.p0_max - p0Min) * i) / (SCAN_POINTS - 1))
    }
    grid.forEach((p0, i) => {
      const x = surrogate(p0)
      if (x > bestX) {
        bestX = x
        bestI = i
      }
    })
    let lo = grid[Math.max(0, bestI - 1)]
    let hi = grid[Math.min(SCAN_POINTS - 1, bestI + 1)]
    for (let i = 0; i < TERNARY_ITERS && hi - lo > 1e-13 * inst.p0_max; i++) {
      const m1 = lo + (hi - lo) / 3
      const m2 = hi - (hi - lo) / 3
      if (surrogate(m1) < surrogate(m2)) lo = m1
      else hi = m2
    }
    const mid = 0.5 * (lo + hi)
    p0Star = [mid, lo, hi, grid[bestI]].reduce((a, b) =>
      surrogate(b) > surrogate(a) ? b : a
    )
  }

  const { s, pReflect } = maxReflectSum(inst, p0Star)
  const arg =
    1 + 2 * inst.y * Math.sqrt(s) - inst.y * inst.y * (siPerWatt * p0Star + inst.sigma2)
  if (arg <= 0) {
    return { objective_bits: null, p0: 0, p_r: zeros(), p_a: zeros(), status: "degenerate_log" }
  }

  let paCap = inst.pa_max
  if (inst.mu > 0) paCap = Math.min(paCap, inst.e_max / inst.mu)
  const pActive = new Array<number>(k).fill(paCap)
  const activeSnr =
    pActive.reduce((acc, pa, i) => acc + pa * inst.h2[i], 0) / inst.sigma2
  const activeRate = inst.B * Math.log2(1 + activeSnr)

  const objective =
    inst.L_tilde - inst.mu * activeRate - inst.t0 * inst.B * Math.log2(arg)
  return {
    objective_bits: objective,
    p0: p0Star,
    p_r: pReflect,
    p_a: pActive,
    status: "ok",
  }
}
