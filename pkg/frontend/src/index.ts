export * from "./layout.js";
export * from "./adapter.js";
export * from "./frameHash.js";
export * from "./tensor.js";
export * from "./init.js";
export * from "./model.js";
export * from "./a2c.js";
export * from "./rnd.js";
