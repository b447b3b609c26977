/* tslint:disable */
/* eslint-disable */

/**
 * `(4 - 5 alpha) / 2`, or NaN where it is undefined.
 */
export function critical_lambda(alpha: number): number;

/**
 * Normalized long-time average at each field in `lambdas`.
 */
export function order_parameter(n: number, alpha: number, lambdas: Float64Array, t_avg: number, dt: number): Float64Array;

/**
 * `[t, Re F, Im F, C]` per sample, flattened, after the quench with field `lambda`.
 */
export function quench_trace(n: number, alpha: number, lambda: number, t_max: number, dt: number): Float64Array;

/**
 * `E_n / N` for every level of `H(alpha)`, ascending.
 */
export function spectrum(n: number, alpha: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly critical_lambda: (a: number) => number;
    readonly order_parameter: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly quench_trace: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly spectrum: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
