/* tslint:disable */
/* eslint-disable */

/**
 * Two distinct `n^d` hypermatrices with equal images at `k`, if any.
 */
export function collide(n: number, d: number, k: number, mode: string, seed: bigint): string;

/**
 * Planar peak for points given one per line as `x y`.
 */
export function planar_peak(points: string, n: bigint): string;

/**
 * Sum deck of a hypermatrix in `"d n\nbits"` form, direct and via the
 * closed-form basis, with a flag saying whether they agree.
 */
export function sum_deck(text: string, k: number, principal: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly collide: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number];
    readonly planar_peak: (a: number, b: number, c: bigint) => [number, number];
    readonly sum_deck: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
