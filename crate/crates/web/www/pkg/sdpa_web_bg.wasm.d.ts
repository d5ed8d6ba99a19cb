/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_ensembledemo_free: (a: number, b: number) => void;
export const __wbg_fusiondemo_free: (a: number, b: number) => void;
export const __wbg_scaledemo_free: (a: number, b: number) => void;
export const ensemble_demo: (a: number, b: number, c: bigint, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const ensembledemo_candidate_rgba: (a: number, b: number) => [number, number];
export const ensembledemo_composites: (a: number) => [number, number];
export const ensembledemo_noisy_rgba: (a: number) => [number, number];
export const ensembledemo_output_rgba: (a: number) => [number, number];
export const ensembledemo_size: (a: number) => number;
export const ensembledemo_winner_rgba: (a: number) => [number, number];
export const ensembledemo_wins: (a: number) => [number, number];
export const fusion_demo: (a: number, b: number, c: number, d: bigint, e: number, f: number) => [number, number, number];
export const fusiondemo_clean_rgba: (a: number) => [number, number];
export const fusiondemo_fused_mse: (a: number) => number;
export const fusiondemo_fused_rgba: (a: number) => [number, number];
export const fusiondemo_noisy_mse: (a: number) => number;
export const fusiondemo_noisy_rgba: (a: number) => [number, number];
export const fusiondemo_size: (a: number) => number;
export const scale_demo: (a: number, b: bigint, c: number, d: number) => [number, number, number];
export const scaledemo_after_rgba: (a: number) => [number, number];
export const scaledemo_before_rgba: (a: number) => [number, number];
export const scaledemo_cnr_after: (a: number) => [number, number];
export const scaledemo_cnr_before: (a: number) => [number, number];
export const scaledemo_size: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
