/** JSON documents exchanged with the solver under test (linear SI units). */

export interface Instance {
  y: number
  mu: number
  sigma2: number
  alpha: number
  h_si_sq: number
  p0_max: number
  pa_max: number
  e_max: number
  gamma0_tilde: number
  h4: number[]
  h2: number[]
  w_qos: number[]
  h0_sq: number
  L_tilde: number
  t0: number
  B: number
}

export type P3Status = "ok" | "infeasible" | "degenerate_log"

export interface P3Result {
  objective_bits: number | null
  p0: number
  p_r: number[]
  p_a: number[]
  status: P3Status
}

export interface FeasibilityResult {
  verdict: "feasible" | "infeasible"
  p0: number
  p_r: number[]
}

const scalarKeys = [
  "y", "mu", "sigma2", "alpha", "h_si_sq", "p0_max", "pa_max", "e_max",
  "gamma0_tilde", "h0_sq", "L_tilde", "t0", "B",
] as const

const vectorKeys = ["h4", "h2", "w_qos"] as const

export function parseInstance(data: unknown): Instance {
  if (typeof data !== "object" || data === null) {
    throw new Error("instance must be a JSON object")
  }
  const record = data as Record<string, unknown>
  for (const key of scalarKeys) {
    const value = record[key]
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new Error(`instance field '${key}' must be a finite number`)
    }
  }
  const lengths = new Set<number>()
  for (const key of vectorKeys) {
    const value = record[key]
    if (!Array.isArray(value) || value.some(x => typeof x !== "number" || !Number.isFinite(x))) {
      throw new Error(`instance field '${key}' must be an array of finite numbers`)
    }
    lengths.add(value.length)
  }
  if (lengths.size !== 1) {
    throw new Error("instance vectors h4/h2/w_qos must share one length")
  }
  return data as Instance
}
