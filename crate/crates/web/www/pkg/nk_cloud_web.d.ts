/* tslint:disable */
/* eslint-disable */

export class CloudView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Point β, if the mean curve crosses the diagonal once.
     */
    beta(): number | undefined;
    beta_star(): number | undefined;
    /**
     * Confident bins, flattened with stride [`BIN_STRIDE`].
     */
    bins(): Float64Array;
    intercept(): number;
    max_fitness(): number;
    slope(): number;
}

export function analytic_curve(heuristic: string, n: number, k: number, temperature: number, step: number): Float64Array;

export function fitness_cloud(n: number, k: number, seed: bigint, heuristic: string, temperature: number, rng_seed: bigint): CloudView;

export function limit_cloud(n: number, k: number, seed: bigint, heuristic: string, temperature: number, rng_seed: bigint, generations: number): CloudView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_cloudview_free: (a: number, b: number) => void;
    readonly analytic_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly cloudview_beta: (a: number) => [number, number];
    readonly cloudview_beta_star: (a: number) => [number, number];
    readonly cloudview_bins: (a: number) => [number, number];
    readonly cloudview_intercept: (a: number) => number;
    readonly cloudview_max_fitness: (a: number) => number;
    readonly cloudview_slope: (a: number) => number;
    readonly fitness_cloud: (a: number, b: number, c: bigint, d: number, e: number, f: number, g: bigint) => [number, number, number];
    readonly limit_cloud: (a: number, b: number, c: bigint, d: number, e: number, f: number, g: bigint, h: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
