export { checkFeasibility, payloadSnrThreshold } from "./feasibility.js"
export { maxPayloadHeadroom, maxReflectSum } from "./lp.js"
export { solveP3 } from "./p3.js"
export { readInstance, writeResult } from "./io.js"
export type { FeasibilityResult, Instance, P3Result, P3Status } from "./types.js"
export { parseInstance } from "./types.js"
