/**
 * Desk-scale training run: staircase task on a single fixed seed,
 * actor-critic baseline, learning curve written as CSV. This is a
 * long-running offline job (hours on CPU); it is not part of the test
 * suite. Usage:
 *
 *   npx ts-node --esm scripts/train.ts [frames] [curve.csv]
 */

import { writeFileSync } from "node:fs";

import { RoguelabEnv } from "../src/adapter.js";
import { Trainer, defaultTrainConfig } from "../src/a2c.js";
import { Rng } from "../src/init.js";
import { PolicyNet, defaultEncoderConfig } from "../src/model.js";
import { Observation } from "../src/layout.js";

const TOTAL_FRAMES = Number(process.argv[2] ?? 1_000_000);
const CURVE_PATH = process.argv[3] ?? "curve.csv";
const FIXED_SEED = 7_654_321;
const EVAL_EPISODES = 100;

async function successRate(env: RoguelabEnv,
                           act: (obs: Observation) => Promise<number>,
                           episodes: number): Promise<number> {
  let successes = 0;
  for (let e = 0; e < episodes; e++) {
    let obs = await env.reset(FIXED_SEED, FIXED_SEED + e);
    let done = false;
    let reward = 0;
    while (!done) {
      const r = await env.stepAscii(await act(obs));
      obs = r.obs;
      done = r.done;
      reward = r.reward;
    }
    if (reward >= 100) successes++;
  }
  return successes / episodes;
}

async function main(): Promise<void> {
  const env = await RoguelabEnv.make("staircase");
  const encCfg = defaultEncoderConfig(env.maxGlyph + 1);
  const actions = env.actionSpace();
  const net = new PolicyNet(encCfg, actions.length, new Rng(1));
  const trainer = new Trainer(net, defaultTrainConfig(),
                              [FIXED_SEED], new Rng(2));

  const rows: string[] = ["frames,mean_return_100,entropy,policy_loss,value_loss"];
  let obs = await env.reset(FIXED_SEED, FIXED_SEED) as unknown as
    Record<string, ArrayLike<number>>;
  let state = net.initialState();
  const gymEnv = {
    reset: (g?: number, e?: number) =>
      env.reset(g, e) as unknown as Promise<Record<string, ArrayLike<number>>>,
    step: async (i: number) => {
      const r = await env.step(i);
      return { obs: r.obs as unknown as Record<string, ArrayLike<number>>,
               reward: r.reward, done: r.done };
    },
  };

  while (trainer.frames < TOTAL_FRAMES) {
    const out = await trainer.unroll(gymEnv, obs, state);
    obs = out.obs;
    state = out.state;
    if (trainer.frames % 3200 < defaultTrainConfig().unrollLength) {
      const l = out.log;
      rows.push(`${l.frames},${l.meanReturn100},${l.entropy},` +
        `${l.policyLoss},${l.valueLoss}`);
      writeFileSync(CURVE_PATH, rows.join("\n") + "\n");
      console.log(`frames ${l.frames}  return100 ${l.meanReturn100.toFixed(3)}` +
        `  entropy ${l.entropy.toFixed(3)}`);
    }
  }

  const rngEval = new Rng(3);
  const randomRate = await successRate(
    env, async () => actions[rngEval.int(actions.length)], EVAL_EPISODES);
  const learnedRate = await successRate(env, async (o) => {
    const out = net.step(o.glyphs, o.blstats,
                         Number(o.blstats[0]), Number(o.blstats[1]),
                         net.initialState());
    let best = 0;
    for (let i = 1; i < out.logProbs.size; i++) {
      if (out.logProbs.data[i] > out.logProbs.data[best]) best = i;
    }
    return actions[best];
  }, EVAL_EPISODES);
  console.log(`random success rate: ${randomRate}`);
  console.log(`learned success rate: ${learnedRate}`);
  console.log(`target: learned >= 0.9 and >= 5x random`);
  await env.close();
}

main().catch((e) => {
  console.error(e);
  process.exit(1);
});
