/**
 * Short content hash of a visible frame, reproducing the environment's
 * recording hash: first 8 bytes of SHA-256 over the chars plane
 * followed by the colors plane, as lowercase hex.
 */

import { createHash } from "node:crypto";

import { Observation } from "./layout.js";

export function frameHash(obs: Observation): string {
  const h = createHash("sha256");
  h.update(Buffer.from(obs.chars.buffer, obs.chars.byteOffset,
                       obs.chars.byteLength));
  h.update(Buffer.from(obs.colors.buffer, obs.colors.byteOffset,
                       obs.colors.byteLength));
  return h.digest().subarray(0, 8).toString("hex");
}
