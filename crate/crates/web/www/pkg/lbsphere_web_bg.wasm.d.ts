/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_relaxation_free: (a: number, b: number) => void;
export const __wbg_spheremap_free: (a: number, b: number) => void;
export const pmaPreview: (a: number, b: number, c: number) => [number, number, number];
export const radiusForDegree: (a: number) => number;
export const relaxation_advance: (a: number, b: number) => [number, number, number];
export const relaxation_converged: (a: number) => number;
export const relaxation_count: (a: number, b: number, c: number) => [number, number, number];
export const relaxation_energies: (a: number) => [number, number];
export const relaxation_energy: (a: number) => number;
export const relaxation_gradSup: (a: number) => number;
export const relaxation_iterations: (a: number) => number;
export const relaxation_map: (a: number) => [number, number, number];
export const relaxation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number];
export const spheremap_cols: (a: number) => number;
export const spheremap_max: (a: number) => number;
export const spheremap_min: (a: number) => number;
export const spheremap_rows: (a: number) => number;
export const spheremap_values: (a: number) => [number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
