/* tslint:disable */
/* eslint-disable */

/**
 * A sampled cone frustrum with its main, finite-measure and CF bound reports.
 */
export function frustrum_bounds(a: number, rho: number, rho_inner: number, e: number, resolution: number): string;

/**
 * A seeded sum of bumps and its symmetric decreasing rearrangement.
 *
 * Returns `{resolution, max, original, rearranged, gradient_l2: [u, u*]}`.
 */
export function rearrange_random(seed: number, resolution: number): string;

/**
 * `|{u > t} symdiff {u* > t}|` against `t`, with `u*` translated optimally.
 */
export function symdiff_curve(a: number, rho: number, rho_inner: number, e: number, levels: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly frustrum_bounds: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly rearrange_random: (a: number, b: number) => [number, number, number, number];
    readonly symdiff_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
