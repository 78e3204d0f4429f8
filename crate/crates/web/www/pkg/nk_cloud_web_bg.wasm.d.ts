/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_cloudview_free: (a: number, b: number) => void;
export const analytic_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const cloudview_beta: (a: number) => [number, number];
export const cloudview_beta_star: (a: number) => [number, number];
export const cloudview_bins: (a: number) => [number, number];
export const cloudview_intercept: (a: number) => number;
export const cloudview_max_fitness: (a: number) => number;
export const cloudview_slope: (a: number) => number;
export const fitness_cloud: (a: number, b: number, c: bigint, d: number, e: number, f: number, g: bigint) => [number, number, number];
export const limit_cloud: (a: number, b: number, c: bigint, d: number, e: number, f: number, g: bigint, h: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
