/* tslint:disable */
/* eslint-disable */

export class EnsembleDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    candidate_rgba(i: number): Uint8Array;
    /**
     * Whole-image composite score of each candidate and then of the output.
     */
    composites(): Float64Array;
    noisy_rgba(): Uint8Array;
    output_rgba(): Uint8Array;
    size(): number;
    /**
     * Each pixel tinted by the candidate that won the last patch covering it.
     */
    winner_rgba(): Uint8Array;
    wins(): Uint32Array;
}

export class FusionDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    clean_rgba(): Uint8Array;
    fused_mse(): number;
    fused_rgba(): Uint8Array;
    /**
     * Mean over all slices of MSE(noisy, clean).
     */
    noisy_mse(): number;
    noisy_rgba(): Uint8Array;
    size(): number;
}

export class ScaleDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    after_rgba(): Uint8Array;
    before_rgba(): Uint8Array;
    cnr_after(): number | undefined;
    cnr_before(): number | undefined;
    size(): number;
}

/**
 * Denoises one speckled slice with median and gaussian filters and merges
 * them patch by patch under the given metric weights.
 */
export function ensemble_demo(size: number, looks: number, seed: bigint, k: number, stride: number, w_cnr: number, w_msr: number, w_tp: number, w_ep: number): EnsembleDemo;

/**
 * Simulates a speckled volume and fuses its middle slice with its neighbours.
 */
export function fusion_demo(size: number, slices: number, looks: number, seed: bigint, radius: number, h: number): FusionDemo;

/**
 * Squeezes a speckled slice into `[lo, hi]` and stretches it back with the
 * min-max color scaling.
 */
export function scale_demo(size: number, seed: bigint, lo: number, hi: number): ScaleDemo;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_ensembledemo_free: (a: number, b: number) => void;
    readonly __wbg_fusiondemo_free: (a: number, b: number) => void;
    readonly __wbg_scaledemo_free: (a: number, b: number) => void;
    readonly ensemble_demo: (a: number, b: number, c: bigint, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly ensembledemo_candidate_rgba: (a: number, b: number) => [number, number];
    readonly ensembledemo_composites: (a: number) => [number, number];
    readonly ensembledemo_noisy_rgba: (a: number) => [number, number];
    readonly ensembledemo_output_rgba: (a: number) => [number, number];
    readonly ensembledemo_size: (a: number) => number;
    readonly ensembledemo_winner_rgba: (a: number) => [number, number];
    readonly ensembledemo_wins: (a: number) => [number, number];
    readonly fusion_demo: (a: number, b: number, c: number, d: bigint, e: number, f: number) => [number, number, number];
    readonly fusiondemo_clean_rgba: (a: number) => [number, number];
    readonly fusiondemo_fused_mse: (a: number) => number;
    readonly fusiondemo_fused_rgba: (a: number) => [number, number];
    readonly fusiondemo_noisy_mse: (a: number) => number;
    readonly fusiondemo_noisy_rgba: (a: number) => [number, number];
    readonly fusiondemo_size: (a: number) => number;
    readonly scale_demo: (a: number, b: bigint, c: number, d: number) => [number, number, number];
    readonly scaledemo_after_rgba: (a: number) => [number, number];
    readonly scaledemo_before_rgba: (a: number) => [number, number];
    readonly scaledemo_cnr_after: (a: number) => [number, number];
    readonly scaledemo_cnr_before: (a: number) => [number, number];
    readonly scaledemo_size: (a: number) => number;
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
