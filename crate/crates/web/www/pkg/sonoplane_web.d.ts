/* tslint:disable */
/* eslint-disable */

/**
 * One tablet game session stepped by the page's timer.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Closes the open frame and opens the next; `false` once the session is over.
     */
    advance(): boolean;
    finished(): boolean;
    /**
     * `[t, pitch_hz, amplitude, timbre, waveshape]` of the current frame.
     */
    frame(): Float64Array;
    /**
     * Milliseconds between frames.
     */
    frame_period_ms(): number;
    /**
     * `hit`, `miss`, `rate_limited`, or empty when no touch resolved last frame.
     */
    last_outcome(): string;
    constructor(seed: bigint, seconds: number);
    score(): number;
    speed_level(): number;
    /**
     * True target position, for the reveal toggle.
     */
    target(): Float64Array;
    /**
     * Touches `(x, y)` in unit-square coordinates, y up, at the current frame.
     */
    touch(x: number, y: number): void;
}

/**
 * Grayscale strip, one column per analysis frame, highest band on top.
 */
export class StripImage {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    height(): number;
    pixels(): Uint8Array;
    width(): number;
}

export function partial_weights(pitch_hz: number, timbre: number, waveshape: number, count: number): Float32Array;

/**
 * Mono samples at [`tone_sample_rate`] Hz.
 */
export function render_tone(pitch_hz: number, amplitude: number, timbre: number, waveshape: number, seconds: number): Float32Array;

export function strip_image(samples: Float32Array, sample_rate: number): StripImage;

export function tone_sample_rate(): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_stripimage_free: (a: number, b: number) => void;
    readonly demo_advance: (a: number) => [number, number, number];
    readonly demo_finished: (a: number) => number;
    readonly demo_frame: (a: number) => [number, number];
    readonly demo_frame_period_ms: (a: number) => number;
    readonly demo_last_outcome: (a: number) => [number, number];
    readonly demo_new: (a: bigint, b: number) => [number, number, number];
    readonly demo_score: (a: number) => number;
    readonly demo_speed_level: (a: number) => number;
    readonly demo_target: (a: number) => [number, number];
    readonly demo_touch: (a: number, b: number, c: number) => [number, number];
    readonly partial_weights: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly render_tone: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly strip_image: (a: number, b: number, c: number) => [number, number, number];
    readonly stripimage_height: (a: number) => number;
    readonly stripimage_pixels: (a: number) => [number, number];
    readonly stripimage_width: (a: number) => number;
    readonly tone_sample_rate: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
