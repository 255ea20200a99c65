import { describe, expect, it } from "vitest";

import { clipReward } from "../src/a2c.js";
import { Rng } from "../src/init.js";

/**
 * Independent reference for tanh(x): exp-based identity computed with
 * expm1 for small arguments, so agreement is not just Math.tanh
 * testing itself.
 */
function refTanh(x: number): number {
  if (x === 0) return 0;
  const e = Math.expm1(-2 * Math.abs(x));
  const t = -e / (2 + e);
  return x > 0 ? t : -t;
}

describe("reward clip tanh(r/100)", () => {
  it("matches the reference evaluation to 1e-9 on 1000 random rewards", () => {
    const rng = new Rng(1234);
    let worst = 0;
    for (let i = 0; i < 1000; i++) {
      // spread over the magnitudes rewards actually take
      const mag = Math.pow(10, rng.next() * 6 - 3);
      const r = (rng.next() < 0.5 ? -1 : 1) * mag;
      const diff = Math.abs(clipReward(r) - refTanh(r / 100));
      if (diff > worst) worst = diff;
    }
    const ok = worst <= 1e-9;
    console.log(`ACCEPTANCE ${ok ? "PASS" : "FAIL"} - reward clip ` +
      `tanh(r/100) vs reference, 1000 samples (worst diff ${worst.toExponential(2)})`);
    expect(ok).toBe(true);
  });

  it("maps 0 to 0", () => {
    expect(clipReward(0)).toBe(0);
  });

  it("maps 100 to tanh(1)", () => {
    expect(Math.abs(clipReward(100) - 0.761594)).toBeLessThan(1e-6);
  });

  it("maps the step penalty to -1e-5", () => {
    expect(Math.abs(clipReward(-0.001) - -1.0e-5)).toBeLessThan(1e-9);
  });
});
