/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_stripimage_free: (a: number, b: number) => void;
export const demo_advance: (a: number) => [number, number, number];
export const demo_finished: (a: number) => number;
export const demo_frame: (a: number) => [number, number];
export const demo_frame_period_ms: (a: number) => number;
export const demo_last_outcome: (a: number) => [number, number];
export const demo_new: (a: bigint, b: number) => [number, number, number];
export const demo_score: (a: number) => number;
export const demo_speed_level: (a: number) => number;
export const demo_target: (a: number) => [number, number];
export const demo_touch: (a: number, b: number, c: number) => [number, number];
export const partial_weights: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const render_tone: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const strip_image: (a: number, b: number, c: number) => [number, number, number];
export const stripimage_height: (a: number) => number;
export const stripimage_pixels: (a: number) => [number, number];
export const stripimage_width: (a: number) => number;
export const tone_sample_rate: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
