/* tslint:disable */
/* eslint-disable */

/**
 * A minimization that the page advances in chunks so it can redraw.
 */
export class Relaxation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Runs up to `iterations` more steps and returns the current energy.
     * Each chunk restarts the method from the current iterate.
     */
    advance(iterations: number): number;
    /**
     * Spots (connected bright regions) or stripes (latitude bands).
     */
    count(kind: string): number;
    /**
     * Energy after every step so far, starting with the initial state.
     */
    energies(): Float64Array;
    energy(): number;
    map(): SphereMap;
    /**
     * `init` is a preset name (S10, S15, L15, ...), `random`, or
     * `GROUP:DEGREE` for a single invariant.
     */
    constructor(init: string, epsilon: number, lambda: number, radius: number, method: string, alpha0: number, seed: bigint);
    readonly converged: boolean;
    readonly gradSup: number;
    readonly iterations: number;
}

/**
 * Samples on a `rows x cols` Gauss-Legendre/equispaced grid, row-major,
 * north pole first.
 */
export class SphereMap {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    max(): number;
    min(): number;
    values(): Float64Array;
    readonly cols: number;
    readonly rows: number;
}

/**
 * Field generated by the invariant of `subgroup` (T, O, I or Zn) at `degree`.
 */
export function pmaPreview(subgroup: string, degree: number): SphereMap;

/**
 * `sqrt(l (l + 1))`, the radius at which degree `l` is critical.
 */
export function radiusForDegree(degree: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_relaxation_free: (a: number, b: number) => void;
    readonly __wbg_spheremap_free: (a: number, b: number) => void;
    readonly pmaPreview: (a: number, b: number, c: number) => [number, number, number];
    readonly radiusForDegree: (a: number) => number;
    readonly relaxation_advance: (a: number, b: number) => [number, number, number];
    readonly relaxation_converged: (a: number) => number;
    readonly relaxation_count: (a: number, b: number, c: number) => [number, number, number];
    readonly relaxation_energies: (a: number) => [number, number];
    readonly relaxation_energy: (a: number) => number;
    readonly relaxation_gradSup: (a: number) => number;
    readonly relaxation_iterations: (a: number) => number;
    readonly relaxation_map: (a: number) => [number, number, number];
    readonly relaxation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number];
    readonly spheremap_cols: (a: number) => number;
    readonly spheremap_max: (a: number) => number;
    readonly spheremap_min: (a: number) => number;
    readonly spheremap_rows: (a: number) => number;
    readonly spheremap_values: (a: number) => [number, number];
    readonly __externref_table_alloc: () => number;
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
