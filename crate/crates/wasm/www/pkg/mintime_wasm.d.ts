/* tslint:disable */
/* eslint-disable */

/**
 * `[theta0, lambda0, theta1, lambda1, ...]` over `(-pi/2, pi/2)`. Failed
 * points come back as NaN.
 */
export function lambda_curve(t: number, steps: number): Float64Array;

/**
 * log10 of the scaled search residual on an `n_theta x n_alpha` grid (row
 * major, theta outer) for the normalized form of the given problem. Alpha
 * is geometric on `[alpha_min, alpha_max]`. Empty if the problem cannot be
 * normalized.
 */
export function residual_field(problem: string, eta: number, n_theta: number, n_alpha: number, alpha_min: number, alpha_max: number): Float64Array;

/**
 * Solves one problem given as JSON (`u1, v1, u2, v2, dx, dy` and an
 * optional `accel_bound`). Returns JSON with either the sampled path or an
 * `error` field.
 */
export function solve_json(problem: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly lambda_curve: (a: number, b: number) => [number, number];
    readonly residual_field: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly solve_json: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
